#include <gtest/gtest.h>

#include "properties.hpp"

namespace {

class Invariant : public ::testing::TestWithParam<props::Property> {};

TEST_P(Invariant, Holds) {
  const std::string failure = GetParam().check();
  EXPECT_TRUE(failure.empty()) << GetParam().module << "/" << GetParam().name << ": " << failure;
}

INSTANTIATE_TEST_SUITE_P(AllModules, Invariant, ::testing::ValuesIn(props::all()),
                         [](const auto& info) { return info.param.module + "_" + info.param.name; });

}  // namespace
