#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hardyheat/evolution.hpp"
#include "hardyheat/scenario.hpp"

namespace hardyheat {

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string suite;
  Scenario scenario;
  std::vector<Check> checks;
  int threads = 1;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& suite_names();

/// Content-addressed run directory:
///   <root>/{scenarios,operators,trajectories,kernels,reports}/<hash>...
/// Writes for one scenario hash are serialised.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);
  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path path(const std::string& kind, const std::string& file) const;
  std::filesystem::path report_path(const Scenario& s, const std::string& suite) const;
  void save_scenario(const Scenario& s) const;
  std::mutex& lock_for(const std::string& hash);

 private:
  std::filesystem::path root_;
  std::mutex table_mutex_;
  std::vector<std::pair<std::string, std::unique_ptr<std::mutex>>> locks_;
};

/// $HARDYHEAT_OUT or ./hardyheat-runs.
std::filesystem::path default_output_root();

/// Runs the suite's checks for every grid level of the scenario.
Report evaluate_suite(const Scenario& s, const std::string& suite);

/// evaluate_suite plus persistence. A stored report for the same scenario hash
/// and suite is returned untouched unless force is set.
std::filesystem::path run_suite(RunStore& store, const Scenario& s, const std::string& suite, bool force = false);

struct SweepResult {
  std::vector<std::filesystem::path> reports;
  std::vector<bool> passed;
  std::vector<bool> cached;
};

/// One scenario per entry of c_factors (c = factor * c*), run on `threads`
/// workers. Resumable: finished reports are reused unless force.
SweepResult sweep(RunStore& store, const Scenario& base, const std::vector<double>& c_factors,
                  const std::string& suite, int threads, bool force = false);

/// Shortest round-trip decimal text.
std::string format_number(double v);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
/// Header row x[,y],u then one row per node.
void write_state_csv(const std::filesystem::path& path, const Grid& grid, const Eigen::VectorXd& u);
/// Header row i,j,value; entries with |value| > 0. Returns the FNV-1a hash of the bytes.
std::string write_triples_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace hardyheat
