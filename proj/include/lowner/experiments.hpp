#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lowner/geometry.hpp"

namespace lowner {

// Comma-separated rows with a header and 12 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::uint64_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  void end_row();

 private:
  void sep();
  std::ostream& out_;
  std::size_t cols_;
  std::size_t filled_ = 0;
};

std::string format_number(double v);  // 12 significant digits, "nan" for NaN

// Radii of one random polytope under each requested method ("exact", "cop", "ktt", "smvie"); NaN when skipped.
struct PolytopeComparison {
  int K = 0, M = 0;
  std::uint64_t seed = 0;
  double r_exact, r_cop, r_ktt, r_smvie;
  bool cop_certificate_passed = false;
  double smvie_primal_dual_gap = 0.0;
  double seconds_exact = 0.0, seconds_cop = 0.0, seconds_ktt = 0.0, seconds_smvie = 0.0;
};
PolytopeComparison compare_methods(const Polytope& P, const std::vector<std::string>& methods);
PolytopeComparison compare_random_polytope(int K, int M, std::uint64_t seed, const std::vector<std::string>& methods);

struct ChippedRow {
  int K = 0;
  double r_exact;  // NaN beyond K = 5
  double r_cop, r_smvie, r_smvie_closed_form, r_cop_bound;
  bool primal_closed_form_passed = false;
  bool dual_closed_form_passed = false;
};
ChippedRow chipped_row(int K, bool with_exact);

struct InventoryRow {
  std::uint64_t seed = 0;
  double pwl, pws, ldr, pwl2;
};
InventoryRow inventory_row(int N, int J, std::uint64_t seed, int threads = 1);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CriterionOptions {
  bool quick = false;             // reduced instance counts
  std::optional<double> tol;      // replaces each criterion's tolerance
  int threads = 1;
};

CriterionResult run_criterion(int id, const CriterionOptions& opts);  // id in 1..10
std::vector<CriterionResult> run_criteria(const CriterionOptions& opts);

}  // namespace lowner
