#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pfp::cnf {

/// A propositional literal: variable index (1-based) with polarity.
struct Literal {
  int variable = 1;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Clause {
  std::vector<Literal> literals;

  friend bool operator==(const Clause&, const Clause&) = default;
};

/// Truth assignment x_1..x_n; entry j-1 holds x_j. Bit 1 means true.
using Assignment = std::vector<bool>;

class CnfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure carrying the 1-based input line where it was detected.
class ParseError : public CnfError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A CNF formula F = C_1 ∧ ... ∧ C_m over variables x_1..x_n.
///
/// Construction validates: m >= 1, every clause nonempty, every variable in
/// [1, n], and no clause repeats the same (variable, polarity) pair. A clause
/// may contain both x_j and its negation. Variables that appear in no clause
/// are allowed.
class CnfFormula {
 public:
  CnfFormula(int num_vars, std::vector<Clause> clauses);

  int num_vars() const noexcept { return num_vars_; }
  std::size_t num_clauses() const noexcept { return clauses_.size(); }
  const std::vector<Clause>& clauses() const noexcept { return clauses_; }
  const Clause& clause(std::size_t i) const { return clauses_.at(i); }

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;

 private:
  int num_vars_;
  std::vector<Clause> clauses_;
};

CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(std::string_view text);
CnfFormula load_dimacs(const std::string& path);

/// Header line followed by one clause per line.
std::string to_dimacs(const CnfFormula& formula);

bool evaluate(const CnfFormula& formula, const Assignment& assignment);
bool evaluate_clause(const Clause& clause, const Assignment& assignment);

/// Assignment index k encodes x_j in bit j-1.
Assignment decode_assignment(std::uint64_t index, int num_vars);
std::uint64_t encode_assignment(const Assignment& assignment);
/// "x_1 x_2 ... x_n" as a string of '0'/'1'.
std::string assignment_string(const Assignment& assignment);

inline constexpr int kDefaultEnumerationLimit = 20;

/// Brute force over all 2^n assignments. Returns satisfying assignment
/// indices in ascending order.
std::vector<std::uint64_t> enumerate_solutions(
    const CnfFormula& formula, int max_vars = kDefaultEnumerationLimit);

/// r_j: number of literal slots (either polarity) that mention x_j.
/// Every variable 1..n has an entry.
std::map<int, int> occurrence_counts(const CnfFormula& formula);

}  // namespace pfp::cnf
