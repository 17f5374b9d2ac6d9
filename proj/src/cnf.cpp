#include "pfp/cnf.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <utility>

namespace pfp::cnf {

ParseError::ParseError(std::size_t line, const std::string& what)
    : CnfError("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

void validate_clause(const Clause& clause, int num_vars, std::size_t index) {
  if (clause.literals.empty()) {
    throw CnfError("clause " + std::to_string(index) + " is empty");
  }
  std::set<std::pair<int, bool>> seen;
  for (const auto& lit : clause.literals) {
    if (lit.variable < 1 || lit.variable > num_vars) {
      throw CnfError("clause " + std::to_string(index) + " references variable " +
                     std::to_string(lit.variable) + " outside [1, " +
                     std::to_string(num_vars) + "]");
    }
    if (!seen.emplace(lit.variable, lit.negated).second) {
      throw CnfError("clause " + std::to_string(index) + " repeats literal " +
                     std::string(lit.negated ? "-" : "") + std::to_string(lit.variable));
    }
  }
}

bool parse_int(std::string_view token, long long& value) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

CnfFormula::CnfFormula(int num_vars, std::vector<Clause> clauses)
    : num_vars_(num_vars), clauses_(std::move(clauses)) {
  if (num_vars_ < 0) throw CnfError("negative variable count");
  if (clauses_.empty()) throw CnfError("formula has no clauses");
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    validate_clause(clauses_[i], num_vars_, i);
  }
}

CnfFormula parse_dimacs(std::istream& in) {
  bool have_header = false;
  long long num_vars = 0;
  long long num_clauses = 0;
  std::vector<Clause> clauses;
  Clause current;
  std::size_t current_start = 0;
  std::size_t line_no = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0].front() == 'c') continue;
    if (tokens[0] == "%") break;  // SATLIB trailer
    if (tokens[0] == "p") {
      if (have_header) throw ParseError(line_no, "duplicate problem line");
      if (tokens.size() != 4 || tokens[1] != "cnf") {
        throw ParseError(line_no, "expected 'p cnf <vars> <clauses>'");
      }
      if (!parse_int(tokens[2], num_vars) || !parse_int(tokens[3], num_clauses) ||
          num_vars < 0 || num_clauses < 0) {
        throw ParseError(line_no, "malformed problem line counts");
      }
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause data before 'p cnf' header");

    for (auto token : tokens) {
      long long value = 0;
      if (!parse_int(token, value)) {
        throw ParseError(line_no, "invalid token '" + std::string(token) + "'");
      }
      if (value == 0) {
        if (current.literals.empty()) throw ParseError(line_no, "empty clause");
        if (static_cast<long long>(clauses.size()) >= num_clauses) {
          throw ParseError(line_no, "more clauses than declared (" +
                                        std::to_string(num_clauses) + ")");
        }
        clauses.push_back(std::move(current));
        current = Clause{};
        continue;
      }
      const long long var = value < 0 ? -value : value;
      if (var > num_vars) {
        throw ParseError(line_no, "variable " + std::to_string(var) + " exceeds declared " +
                                      std::to_string(num_vars));
      }
      const Literal lit{static_cast<int>(var), value < 0};
      for (const auto& existing : current.literals) {
        if (existing == lit) {
          throw ParseError(line_no, "duplicate literal " + std::string(token) + " in clause");
        }
      }
      if (current.literals.empty()) current_start = line_no;
      current.literals.push_back(lit);
    }
  }

  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing 'p cnf' header");
  if (!current.literals.empty()) {
    throw ParseError(current_start, "clause not terminated by 0");
  }
  if (static_cast<long long>(clauses.size()) != num_clauses) {
    throw ParseError(line_no, "clause count mismatch: declared " + std::to_string(num_clauses) +
                                  ", found " + std::to_string(clauses.size()));
  }
  if (clauses.empty()) throw ParseError(line_no, "formula has no clauses");
  return CnfFormula(static_cast<int>(num_vars), std::move(clauses));
}

CnfFormula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

CnfFormula load_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CnfError("cannot open '" + path + "'");
  return parse_dimacs(in);
}

std::string to_dimacs(const CnfFormula& formula) {
  std::ostringstream out;
  out << "p cnf " << formula.num_vars() << ' ' << formula.num_clauses() << '\n';
  for (const auto& clause : formula.clauses()) {
    for (const auto& lit : clause.literals) {
      out << (lit.negated ? -lit.variable : lit.variable) << ' ';
    }
    out << "0\n";
  }
  return out.str();
}

bool evaluate_clause(const Clause& clause, const Assignment& assignment) {
  for (const auto& lit : clause.literals) {
    if (assignment.at(lit.variable - 1) != lit.negated) return true;
  }
  return false;
}

bool evaluate(const CnfFormula& formula, const Assignment& assignment) {
  if (assignment.size() != static_cast<std::size_t>(formula.num_vars())) {
    throw CnfError("assignment has " + std::to_string(assignment.size()) +
                   " bits, formula has " + std::to_string(formula.num_vars()) + " variables");
  }
  for (const auto& clause : formula.clauses()) {
    if (!evaluate_clause(clause, assignment)) return false;
  }
  return true;
}

Assignment decode_assignment(std::uint64_t index, int num_vars) {
  Assignment a(static_cast<std::size_t>(num_vars));
  for (int j = 0; j < num_vars; ++j) a[j] = ((index >> j) & 1U) != 0;
  return a;
}

std::uint64_t encode_assignment(const Assignment& assignment) {
  std::uint64_t k = 0;
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    if (assignment[j]) k |= std::uint64_t{1} << j;
  }
  return k;
}

std::string assignment_string(const Assignment& assignment) {
  std::string s;
  s.reserve(assignment.size());
  for (bool b : assignment) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<std::uint64_t> enumerate_solutions(const CnfFormula& formula, int max_vars) {
  if (formula.num_vars() > max_vars) {
    throw CnfError("enumeration limit exceeded: " + std::to_string(formula.num_vars()) +
                   " variables > " + std::to_string(max_vars));
  }
  std::vector<std::uint64_t> solutions;
  const std::uint64_t total = std::uint64_t{1} << formula.num_vars();
  for (std::uint64_t k = 0; k < total; ++k) {
    if (evaluate(formula, decode_assignment(k, formula.num_vars()))) solutions.push_back(k);
  }
  return solutions;
}

std::map<int, int> occurrence_counts(const CnfFormula& formula) {
  std::map<int, int> counts;
  for (int j = 1; j <= formula.num_vars(); ++j) counts[j] = 0;
  for (const auto& clause : formula.clauses()) {
    for (const auto& lit : clause.literals) ++counts[lit.variable];
  }
  return counts;
}

}  // namespace pfp::cnf
