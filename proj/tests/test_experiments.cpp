#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "lowner/experiments.hpp"

using namespace lowner;

TEST(Experiments, CsvWriterFormatsRows) {
  std::ostringstream out;
  CsvWriter w(out, {"seed", "name", "value"});
  w << 3 << "cop" << 1.0 / 3.0;
  w.end_row();
  w << 4 << "nan" << std::numeric_limits<double>::quiet_NaN();
  w.end_row();
  EXPECT_EQ(out.str(), "seed,name,value\n3,cop,0.333333333333\n4,nan,nan\n");
}

TEST(Experiments, CsvWriterRejectsWrongFieldCount) {
  std::ostringstream out;
  CsvWriter w(out, {"a", "b"});
  w << 1.0;
  EXPECT_THROW(w.end_row(), std::logic_error);
  std::ostringstream out2;
  CsvWriter w2(out2, {"a"});
  w2 << 1.0;
  EXPECT_THROW(w2 << 2.0, std::logic_error);
}

TEST(Experiments, FormatNumber) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(1234567.891234567), "1234567.89123");
}

TEST(Experiments, CompareRandomPolytopeOrdering) {
  const PolytopeComparison c = compare_random_polytope(2, 4, 1, {"exact", "cop", "smvie"});
  EXPECT_TRUE(std::isnan(c.r_ktt));
  EXPECT_LE(c.r_exact, c.r_cop * (1.0 + 1e-6));
  EXPECT_LE(c.r_cop, c.r_smvie * (1.0 + 1e-6));
  EXPECT_TRUE(c.cop_certificate_passed);
  EXPECT_LE(std::abs(c.smvie_primal_dual_gap), 1e-5);
  EXPECT_THROW(compare_random_polytope(2, 4, 1, {"bogus"}), std::invalid_argument);
}

TEST(Experiments, ChippedRowClosedForms) {
  const ChippedRow r = chipped_row(3, true);
  EXPECT_TRUE(r.primal_closed_form_passed);
  EXPECT_TRUE(r.dual_closed_form_passed);
  EXPECT_NEAR(r.r_smvie, r.r_smvie_closed_form, 1e-5);
  EXPECT_LE(r.r_cop, r.r_smvie * (1.0 + 1e-6));
  EXPECT_LE(r.r_exact, r.r_cop * (1.0 + 1e-6));
}

TEST(Experiments, QuickCriterionSeven) {
  CriterionOptions o;
  o.quick = true;
  const CriterionResult r = run_criterion(7, o);
  EXPECT_EQ(r.id, 7);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Experiments, UnknownCriterionIsRejected) { EXPECT_THROW(run_criterion(11, {}), std::invalid_argument); }
