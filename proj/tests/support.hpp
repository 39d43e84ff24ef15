#pragma once

#include <cmath>
#include <gtest/gtest.h>

#include "freelab/error.hpp"

namespace testing_support {

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testing_support

// Asserts that `stmt` throws freelab::Error of the given kind.
#define EXPECT_FREELAB_ERROR(stmt, expected_kind)                                  \
  do {                                                                             \
    bool caught_ = false;                                                          \
    try {                                                                          \
      stmt;                                                                        \
    } catch (const freelab::Error& e_) {                                           \
      caught_ = true;                                                              \
      EXPECT_EQ(e_.kind(), freelab::ErrorKind::expected_kind) << e_.what();        \
    }                                                                              \
    EXPECT_TRUE(caught_) << "no freelab::Error thrown by " #stmt;                  \
  } while (0)
