#include <gtest/gtest.h>

#include "test_support.hpp"
#include "ttj/convolution.hpp"
#include "ttj/error.hpp"
#include "ttj/text_format.hpp"

namespace ttj {
namespace {

using testing::box_query;
using Names = std::vector<std::string>;

TEST(ConvolutionTest, RootedBoxConvolution) {
  auto q = box_query();
  auto c = parse_convolution("(root:(S1 S2 S3 S4) R1 R2 R3 R4)");
  EXPECT_TRUE(validate_convolution(q, c));
  EXPECT_TRUE(is_rooted(c));
  EXPECT_EQ(c.to_string(), "(root:(S1 S2 S3 S4) R1 R2 R3 R4)");
}

TEST(ConvolutionTest, MissingAtomIsInvalid) {
  auto q = box_query();
  EXPECT_FALSE(validate_convolution(q, parse_convolution("(root:(S1 S2 S3 S4) R1 R2 R3)")));
  EXPECT_FALSE(
      validate_convolution(q, parse_convolution("(root:(S1 S2 S3 S4) R1 R2 R3 R4 R4)")));
}

TEST(ConvolutionTest, CyclicGroupIsInvalid) {
  auto q = box_query();
  EXPECT_FALSE(validate_convolution(q, parse_convolution("((R1 R2 R3 R4) S1 S2 S3 S4)")));
}

TEST(ConvolutionTest, BinaryShapedConvolutionIsValid) {
  auto q = box_query();
  auto c = parse_convolution("((((((((S1 S2) S3) S4) R1) R2) R3) R4))");
  EXPECT_TRUE(validate_convolution(q, c));
}

TEST(ConvolutionTest, SeveralNestedNodesAreValidButNotRooted) {
  auto q = box_query();
  auto c = parse_convolution("((S1 S2 S3 S4) (R1 R2) (R3 R4))");
  EXPECT_TRUE(validate_convolution(q, c));
  EXPECT_FALSE(is_rooted(c));
  EXPECT_THROW(plan_from_rooted(q, c), PlanError);
}

TEST(ConvolutionTest, UnmarkedNestedNodeIsNotRooted) {
  auto q = box_query();
  auto c = parse_convolution("((S1 S2 S3 S4) R1 R2 R3 R4)");
  EXPECT_TRUE(validate_convolution(q, c));
  EXPECT_FALSE(is_rooted(c));
}

TEST(ConvolutionTest, BoxPlanPointsAtTheLastInnerStep) {
  auto q = box_query();
  auto p = plan_from_rooted(q, parse_convolution("(root:(S1 S2 S3 S4) R1 R2 R3 R4)"));
  EXPECT_EQ(p.aliases(), (Names{"S1", "S2", "S3", "S4", "R1", "R2", "R3", "R4"}));
  EXPECT_EQ(p.segment_ends(), (std::vector<PlanPos>{4, 8}));
  EXPECT_EQ(p.segment_of(4), 1u);
  EXPECT_EQ(p.segment_of(5), 2u);
  for (PlanPos i = 2; i <= 4; ++i) {
    EXPECT_EQ(p.step(i).parent_pos, PlanPos{1});
    EXPECT_FALSE(p.step(i).cyclic_parent);
  }
  for (PlanPos i = 5; i <= 8; ++i) {
    EXPECT_EQ(p.step(i).parent_pos, PlanPos{4}) << i;
    EXPECT_TRUE(p.step(i).cyclic_parent) << i;
  }
  EXPECT_EQ(p.step(5).keys, (Names{"x1", "x2"}));
  EXPECT_EQ(p.step(8).keys, (Names{"x4", "x1"}));
  EXPECT_TRUE(p.has_cyclic_parents());
}

TEST(ConvolutionTest, TwoLevelChain) {
  auto q = parse_query("A(a,b)\nB(b,c)\nC(c,a)\n");
  auto c = parse_convolution("(root:(A B) C)");
  ASSERT_TRUE(validate_convolution(q, c));
  auto p = plan_from_rooted(q, c);
  EXPECT_EQ(p.aliases(), (Names{"A", "B", "C"}));
  EXPECT_EQ(p.step(2).parent_pos, PlanPos{1});
  EXPECT_FALSE(p.step(2).cyclic_parent);
  EXPECT_EQ(p.step(3).parent_pos, PlanPos{2});
  EXPECT_TRUE(p.step(3).cyclic_parent);
}

TEST(ConvolutionTest, AcyclicQueryAsOneTree) {
  auto q = testing::q1();
  auto c = parse_convolution("(R S T U)");
  ASSERT_TRUE(validate_convolution(q, c));
  EXPECT_TRUE(is_rooted(c));
  auto p = plan_from_rooted(q, c);
  EXPECT_EQ(p.aliases(), (Names{"R", "S", "T", "U"}));
  EXPECT_FALSE(p.has_cyclic_parents());
  EXPECT_EQ(p.segment_ends(), std::vector<PlanPos>{4});
}

TEST(ConvolutionTest, GroupQueryAddsVirtualAtoms) {
  auto q = box_query();
  auto c = parse_convolution("(root:(S1 S2 S3 S4) R1 R2 R3 R4)");
  auto g = group_query(q, c, {"V"});
  ASSERT_EQ(g.size(), 5u);
  auto v = g.atom(g.index_of("V"));
  EXPECT_EQ(v.vars.size(), 5u);
  EXPECT_TRUE(v.has_var("y"));
  EXPECT_TRUE(is_acyclic(g));
}

TEST(ConvolutionTest, ParserErrors) {
  EXPECT_THROW(parse_convolution("(A B"), ParseError);
  EXPECT_THROW(parse_convolution("()"), ParseError);
  EXPECT_THROW(parse_convolution("(root: A B)"), ParseError);
}

}  // namespace
}  // namespace ttj
