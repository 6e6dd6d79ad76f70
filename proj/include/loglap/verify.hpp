#pragma once

#include <string>
#include <vector>

namespace loglap::verify {

struct Check {
  std::string id;
  std::string description;
  double measured;
  double bound;
  bool pass;           // measured <= bound
  std::string source;  // the statement being checked
};

Check make_check(std::string id, std::string description, double measured, double bound, std::string source);

struct Criterion {
  int number;  // 0 is the special-function spot suite, 1..16 the acceptance list
  std::string title;
  std::vector<Check> checks;
  long wall_time_ms = 0;

  bool pass() const;
  // Largest measured/bound over the checks; <= 1 means all pass.
  double worst_margin() const;
};

Criterion run_criterion(int number, int workers);

const std::vector<std::string>& suite_names();
std::vector<int> suite_criteria(const std::string& suite);

struct Report {
  std::string suite;
  std::vector<Criterion> criteria;
  long wall_time_ms = 0;

  bool pass() const;
  std::string json() const;
};

Report run_suite(const std::string& suite, int workers);

}  // namespace loglap::verify
