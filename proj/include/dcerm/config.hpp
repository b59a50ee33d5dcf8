#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcerm/hypothesis.hpp"
#include "dcerm/losses.hpp"
#include "dcerm/risk.hpp"
#include "dcerm/theorems.hpp"

namespace dcerm {

/// Sectioned key = value text. '#' and ';' start comments.
class ConfigDocument {
 public:
  static ConfigDocument parse(std::istream& in);
  static ConfigDocument parse_file(const std::filesystem::path& path);

  bool has_section(const std::string& section) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class MRuleKind { fixed, sqrt_n, power };

/// How m is chosen for a given N.
struct MRule {
  MRuleKind kind = MRuleKind::sqrt_n;
  std::size_t fixed = 1;
  double exponent = 0.5;

  std::size_t evaluate(std::size_t n) const;
  std::string describe() const;
  static MRule parse(const std::string& text);
};

struct SweepConfig {
  std::vector<std::size_t> n_grid;
  MRule m_rule;
  /// Processor exponent r for the non-strongly-convex regime; defaults to the
  /// m rule's exponent.
  double r = 0.5;
  std::size_t seed_count = 20;
  std::uint64_t seed = 0;
  LossSpec loss;
  DistributionSpec distribution = DistributionSpec::make(FeatureSpace::linear(1, 1.0),
                                                         Eigen::VectorXd::Zero(1),
                                                         NoiseLaw::uniform, 0.0);
  double tolerance = 0.0;
  std::size_t max_iter = 0;
  double delta = 0.05;
  std::size_t mc_samples = 200'000;
  std::size_t reference_samples = 1'000'000;
  std::optional<TheoremId> theorem;
  double margin = 0.25;
  std::filesystem::path out = "out";
  std::size_t threads = 1;
  bool record_timing = false;

  const FeatureSpace& space() const { return distribution.space; }

  /// Builds and validates a config; unknown sections or keys are rejected
  /// with std::invalid_argument.
  static SweepConfig from_document(const ConfigDocument& doc);
  static SweepConfig from_file(const std::filesystem::path& path);
  /// Checks the invariants (strictly increasing grid, r in [0, 1/2], ...).
  void validate() const;
  /// The config rendered back in the file format.
  std::string to_text() const;
};

}  // namespace dcerm
