#include "dcerm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dcerm {

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + key + "' expects a number, got '" + v + "'");
  }
}

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + key + "' expects a nonnegative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("'" + key + "' expects on/off, got '" + v + "'");
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"space", {"kind", "dim", "input_dim", "decay", "radius", "domain"}},
      {"loss", {"family", "ridge", "epsilon"}},
      {"distribution",
       {"weights", "profile", "weights_norm", "noise", "sigma", "labels", "label_bound"}},
      {"sweep",
       {"n_grid", "m_rule", "r", "seeds", "seed", "tol", "max_iter", "delta", "mc_samples",
        "ref_samples", "theorem", "margin", "out", "threads", "timing"}},
  };
  return keys;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::istream& in) {
  ConfigDocument doc;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = " (line " + std::to_string(lineno) + ")";
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("malformed section header" + where);
      section = trim(line.substr(1, line.size() - 2));
      if (!allowed_keys().contains(section))
        throw std::invalid_argument("unknown section [" + section + "]" + where);
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key = value" + where);
    if (section.empty()) throw std::invalid_argument("key outside any section" + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!allowed_keys().at(section).contains(key))
      throw std::invalid_argument("unknown key '" + key + "' in [" + section + "]" + where);
    auto& sec = doc.sections_[section];
    if (sec.contains(key)) throw std::invalid_argument("duplicate key '" + key + "'" + where);
    sec[key] = value;
  }
  return doc;
}

ConfigDocument ConfigDocument::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse(in);
}

bool ConfigDocument::has_section(const std::string& section) const {
  return sections_.contains(section);
}

std::optional<std::string> ConfigDocument::get(const std::string& section,
                                               const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::size_t MRule::evaluate(std::size_t n) const {
  std::size_t m = 1;
  switch (kind) {
    case MRuleKind::fixed: m = fixed; break;
    case MRuleKind::sqrt_n: {
      m = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
      while ((m + 1) * (m + 1) <= n) ++m;
      while (m * m > n) --m;
      break;
    }
    case MRuleKind::power:
      m = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), exponent) + 1e-9));
      break;
  }
  return std::max<std::size_t>(m, 1);
}

std::string MRule::describe() const {
  switch (kind) {
    case MRuleKind::fixed: return "fixed:" + std::to_string(fixed);
    case MRuleKind::sqrt_n: return "sqrt";
    case MRuleKind::power: return "power:" + format_double(exponent);
  }
  return "?";
}

MRule MRule::parse(const std::string& text) {
  MRule rule;
  if (text == "sqrt") {
    rule.kind = MRuleKind::sqrt_n;
    rule.exponent = 0.5;
  } else if (text.starts_with("fixed:")) {
    rule.kind = MRuleKind::fixed;
    rule.fixed = to_size("m_rule", text.substr(6));
    rule.exponent = 0.0;
    if (rule.fixed == 0) throw std::invalid_argument("fixed m must be >= 1");
  } else if (text.starts_with("power:")) {
    rule.kind = MRuleKind::power;
    rule.exponent = to_double("m_rule", text.substr(6));
  } else {
    throw std::invalid_argument("m_rule must be sqrt, fixed:<m> or power:<r>, got '" + text + "'");
  }
  return rule;
}

SweepConfig SweepConfig::from_document(const ConfigDocument& doc) {
  for (const char* s : {"space", "loss", "distribution", "sweep"})
    if (!doc.has_section(s)) throw std::invalid_argument(std::string("missing section [") + s + "]");
  auto get = [&](const char* sec, const char* key) { return doc.get(sec, key); };
  auto need = [&](const char* sec, const char* key) {
    auto v = doc.get(sec, key);
    if (!v) throw std::invalid_argument(std::string("missing key '") + key + "' in [" + sec + "]");
    return *v;
  };

  // [space]
  const SpaceKind kind = parse_space_kind(need("space", "kind"));
  const std::size_t dim = to_size("dim", need("space", "dim"));
  const double radius = to_double("radius", get("space", "radius").value_or("1"));
  const InputDomain domain = parse_input_domain(get("space", "domain").value_or("hypercube"));
  std::optional<FeatureSpace> space;
  switch (kind) {
    case SpaceKind::linear: space = FeatureSpace::linear(dim, radius, domain); break;
    case SpaceKind::finite_rank_kernel:
      space = FeatureSpace::finite_rank(
          dim, to_size("input_dim", get("space", "input_dim").value_or(std::to_string(dim))),
          radius, domain);
      break;
    case SpaceKind::eigen_decay:
      space = FeatureSpace::eigen_decay(dim, to_double("decay", need("space", "decay")), radius,
                                        domain);
      break;
  }

  SweepConfig cfg;
  // [loss]
  cfg.loss.family = parse_loss_family(need("loss", "family"));
  cfg.loss.ridge = to_double("ridge", get("loss", "ridge").value_or("0"));
  cfg.loss.epsilon = to_double("epsilon", get("loss", "epsilon").value_or("0.1"));

  // [distribution]
  Eigen::VectorXd w(static_cast<Eigen::Index>(dim));
  if (auto list = get("distribution", "weights")) {
    const auto items = split(*list, ',');
    if (items.size() != dim) throw std::invalid_argument("'weights' must have dim entries");
    for (std::size_t k = 0; k < dim; ++k) w(static_cast<Eigen::Index>(k)) = to_double("weights", items[k]);
  } else {
    const std::string profile = get("distribution", "profile").value_or("uniform");
    for (std::size_t k = 0; k < dim; ++k) {
      double v = 0.0;
      if (profile == "uniform") v = 1.0;
      else if (profile == "harmonic") v = 1.0 / static_cast<double>(k + 1);
      else if (profile == "axis") v = k == 0 ? 1.0 : 0.0;
      else throw std::invalid_argument("profile must be uniform, harmonic or axis");
      w(static_cast<Eigen::Index>(k)) = v;
    }
    w *= to_double("weights_norm", get("distribution", "weights_norm").value_or("1")) / w.norm();
  }
  cfg.distribution = DistributionSpec::make(
      *space, w, parse_noise_law(get("distribution", "noise").value_or("uniform")),
      to_double("sigma", get("distribution", "sigma").value_or("0")),
      parse_label_rule(get("distribution", "labels").value_or("regression")),
      to_double("label_bound", get("distribution", "label_bound").value_or("0")));

  // [sweep]
  cfg.n_grid.clear();
  for (const auto& item : split(need("sweep", "n_grid"), ',')) cfg.n_grid.push_back(to_size("n_grid", item));
  cfg.m_rule = MRule::parse(get("sweep", "m_rule").value_or("sqrt"));
  cfg.r = std::min(cfg.m_rule.exponent, 0.5);
  if (auto r = get("sweep", "r")) cfg.r = to_double("r", *r);
  cfg.seed_count = to_size("seeds", get("sweep", "seeds").value_or("20"));
  cfg.seed = to_size("seed", get("sweep", "seed").value_or("0"));
  cfg.tolerance = to_double("tol", get("sweep", "tol").value_or("0"));
  cfg.max_iter = to_size("max_iter", get("sweep", "max_iter").value_or("0"));
  cfg.delta = to_double("delta", get("sweep", "delta").value_or("0.05"));
  cfg.mc_samples = to_size("mc_samples", get("sweep", "mc_samples").value_or("200000"));
  cfg.reference_samples = to_size("ref_samples", get("sweep", "ref_samples").value_or("1000000"));
  if (auto t = get("sweep", "theorem"); t && *t != "none") cfg.theorem = parse_theorem_id(*t);
  cfg.margin = to_double("margin", get("sweep", "margin").value_or("0.25"));
  cfg.out = get("sweep", "out").value_or("out");
  cfg.threads = to_size("threads", get("sweep", "threads").value_or("1"));
  cfg.record_timing = to_bool("timing", get("sweep", "timing").value_or("off"));

  cfg.loss = certify_constants(cfg.loss, cfg.distribution.loss_domain());
  cfg.validate();
  return cfg;
}

SweepConfig SweepConfig::from_file(const std::filesystem::path& path) {
  return from_document(ConfigDocument::parse_file(path));
}

void SweepConfig::validate() const {
  if (n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0) throw std::invalid_argument("n_grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("n_grid must be strictly increasing");
  }
  if (seed_count == 0) throw std::invalid_argument("seeds must be >= 1");
  if (m_rule.kind == MRuleKind::power && !(m_rule.exponent >= 0.0 && m_rule.exponent <= 1.0))
    throw std::invalid_argument("power m_rule exponent must lie in [0, 1]");
  if (!(r >= 0.0 && r <= 0.5)) throw std::invalid_argument("r must lie in [0, 1/2]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (mc_samples < 2) throw std::invalid_argument("mc_samples must be >= 2");
  if (reference_samples < 1) throw std::invalid_argument("ref_samples must be >= 1");
  if (threads == 0) throw std::invalid_argument("threads must be >= 1");
  if (!(margin >= 0.0)) throw std::invalid_argument("margin must be nonnegative");
  if (tolerance < 0.0) throw std::invalid_argument("tol must be nonnegative");
  const FeatureSpace& s = space();
  if (s.kind() == SpaceKind::eigen_decay && eigen_tail_fraction(s.decay(), s.dim()) >= 0.01)
    throw std::invalid_argument("eigen-decay dim too small: tail beyond dim carries >= 1% of the mass");
}

std::string SweepConfig::to_text() const {
  const FeatureSpace& s = space();
  std::ostringstream os;
  os << "[space]\nkind = " << to_string(s.kind()) << "\ndim = " << s.dim();
  if (s.kind() == SpaceKind::finite_rank_kernel) os << "\ninput_dim = " << s.input_dim();
  if (s.kind() == SpaceKind::eigen_decay) os << "\ndecay = " << format_double(s.decay());
  os << "\nradius = " << format_double(s.radius()) << "\ndomain = " << to_string(s.domain());
  os << "\n\n[loss]\nfamily = " << to_string(loss.family) << "\nridge = " << format_double(loss.ridge)
     << "\nepsilon = " << format_double(loss.epsilon);
  os << "\n\n[distribution]\nweights = ";
  for (Eigen::Index k = 0; k < distribution.true_weights.size(); ++k)
    os << (k ? "," : "") << format_double(distribution.true_weights(k));
  os << "\nnoise = " << to_string(distribution.noise) << "\nsigma = " << format_double(distribution.sigma)
     << "\nlabels = " << to_string(distribution.labels)
     << "\nlabel_bound = " << format_double(distribution.label_bound);
  os << "\n\n[sweep]\nn_grid = ";
  for (std::size_t i = 0; i < n_grid.size(); ++i) os << (i ? "," : "") << n_grid[i];
  os << "\nm_rule = " << m_rule.describe() << "\nr = " << format_double(r) << "\nseeds = " << seed_count
     << "\nseed = " << seed << "\ntol = " << format_double(tolerance) << "\nmax_iter = " << max_iter
     << "\ndelta = " << format_double(delta) << "\nmc_samples = " << mc_samples
     << "\nref_samples = " << reference_samples
     << "\ntheorem = " << (theorem ? std::string(to_string(*theorem)) : std::string("none"))
     << "\nmargin = " << format_double(margin) << "\nout = " << out.string() << "\nthreads = " << threads
     << "\ntiming = " << (record_timing ? "on" : "off") << "\n";
  return os.str();
}

}  // namespace dcerm
