#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "hs/parallel.hpp"

using namespace hs;

TEST(Parallel, ResultsInIndexOrder) {
    for (Exec e : {Exec::Serial, Exec::OpenMP}) {
        const auto v = parallel_map(e, 1000, [](std::size_t i) { return std::sqrt(double(i)); });
        ASSERT_EQ(v.size(), 1000u);
        for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], std::sqrt(double(i)));
    }
}

TEST(Parallel, SerialAndOpenMPAgreeBitwise) {
    auto f = [](std::size_t i) { return std::sin(0.001 * i) * std::exp(-1e-4 * i); };
    EXPECT_EQ(parallel_map(Exec::Serial, 5000, f), parallel_map(Exec::OpenMP, 5000, f));
}

TEST(Parallel, ExceptionsPropagate) {
    auto f = [](std::size_t i) -> int {
        if (i == 37) throw std::runtime_error("cell 37");
        return int(i);
    };
    EXPECT_THROW(parallel_map(Exec::OpenMP, 100, f), std::runtime_error);
    EXPECT_THROW(parallel_map(Exec::Serial, 100, f), std::runtime_error);
}

TEST(Parallel, EmptyRange) { EXPECT_TRUE(parallel_map(Exec::OpenMP, 0, [](std::size_t) { return 1; }).empty()); }

TEST(Parallel, ThreadCap) { EXPECT_GE(max_threads(), 1); }
