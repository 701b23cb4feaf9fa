#include "motorflux/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "motorflux/cli/format.hpp"

namespace motorflux::cli {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::config, msg); }

double to_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) config_error(where + ": '" + text + "' is not a number");
  return v;
}

long to_integer(const std::string& text, const std::string& where) {
  long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) config_error(where + ": '" + text + "' is not an integer");
  return v;
}

std::vector<double> to_list(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) {
      if (text.find_first_not_of(" \t") == std::string::npos) break;
      config_error(where + ": empty list entry");
    }
    out.push_back(to_double(item.substr(b, e - b + 1), where));
  }
  return out;
}

// Reads keys of one section, remembering which ones were consumed so that
// anything left over can be reported as unknown.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return it->second.data();
  }
  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto v = raw(key);
    if (!v) {
      if (!fallback) config_error(where(key) + ": required key missing");
      return *fallback;
    }
    return to_double(*v, where(key));
  }
  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) {
    auto v = raw(key);
    if (!v) {
      if (!fallback) config_error(where(key) + ": required key missing");
      return *fallback;
    }
    return to_integer(*v, where(key));
  }
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    auto v = raw(key);
    if (!v) {
      if (!fallback) config_error(where(key) + ": required key missing");
      return *fallback;
    }
    return *v;
  }
  std::vector<double> list(const std::string& key) {
    auto v = raw(key);
    return v ? to_list(*v, where(key)) : std::vector<double>{};
  }
  bool has(const std::string& key) const {
    return tree_ && tree_->find(key) != tree_->not_found();
  }

  void finish() const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_) {
      if (!used_.count(key)) config_error("unknown key '" + key + "' in [" + name_ + "]");
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

void expect_params(const std::vector<double>& p, std::size_t lo, std::size_t hi,
                   const std::string& where) {
  if (p.size() < lo || p.size() > hi) {
    std::ostringstream os;
    os << where << ": expected " << lo;
    if (hi != lo) os << " to " << hi;
    os << " values, got " << p.size();
    config_error(os.str());
  }
}

void split_table(const std::vector<double>& p, std::vector<double>& xs, std::vector<double>& ys,
                 const std::string& where) {
  if (p.size() < 4 || p.size() % 2 != 0) config_error(where + ": table needs x,y pairs (>= 2)");
  for (std::size_t k = 0; k < p.size(); k += 2) {
    if (!xs.empty() && !(p[k] > xs.back())) config_error(where + ": table x must increase");
    xs.push_back(p[k]);
    ys.push_back(p[k + 1]);
  }
}

PotentialSpec read_potential(Section& s) {
  const std::string kind = s.text("potential.kind", "zero");
  const std::vector<double> p = s.list("potential.params");
  const std::string where = s.where("potential.params");
  if (kind == "zero") {
    expect_params(p, 0, 0, where);
    return PotentialSpec::zero();
  }
  if (kind == "linear") {
    expect_params(p, 1, 2, where);
    return PotentialSpec::linear(p[0], p.size() > 1 ? p[1] : 0.0);
  }
  if (kind == "cosine") {
    expect_params(p, 2, 3, where);
    return PotentialSpec::cosine(p[0], p[1], p.size() > 2 ? p[2] : 0.0);
  }
  if (kind == "sawtooth_smoothed") {
    expect_params(p, 2, 4, where);
    const int harmonics = p.size() > 3 ? static_cast<int>(p[3]) : 3;
    if (p.size() > 3 && (p[3] != harmonics || harmonics < 1)) {
      config_error(where + ": harmonics must be a positive integer");
    }
    return PotentialSpec::sawtooth(p[0], p[1], p.size() > 2 ? p[2] : 0.0, harmonics);
  }
  if (kind == "tabulated") {
    PotentialSpec out;
    out.kind = PotentialKind::tabulated;
    split_table(p, out.xs, out.ys, where);
    return out;
  }
  config_error(s.where("potential.kind") + ": unknown potential kind '" + kind + "'");
}

ReactionSpec read_reaction(Section& s) {
  const std::string kind = s.text("reaction.kind", "linear");
  const std::vector<double> p = s.list("reaction.params");
  const std::string where = s.where("reaction.params");
  if (kind == "linear") {
    expect_params(p, 0, 0, where);
    return ReactionSpec::linear();
  }
  if (kind == "power") {
    expect_params(p, 1, 1, where);
    return ReactionSpec::power(p[0]);
  }
  config_error(s.where("reaction.kind") + ": unknown reaction kind '" + kind + "'");
}

InitialSpec read_initial(Section& s, const std::string& prefix) {
  const std::string kind = s.text(prefix + ".kind", "constant");
  const std::vector<double> p = s.list(prefix + ".params");
  const std::string where = s.where(prefix + ".params");
  InitialSpec out;
  if (kind == "constant") {
    expect_params(p, 0, 1, where);
    out.kind = InitialKind::constant;
    out.value = p.empty() ? 1.0 : p[0];
  } else if (kind == "cosine") {
    expect_params(p, 3, 4, where);
    out.kind = InitialKind::cosine;
    out.value = p[0];
    out.amplitude = p[1];
    out.period = p[2];
    out.shift = p.size() > 3 ? p[3] : 0.0;
  } else if (kind == "gaussian") {
    expect_params(p, 4, 4, where);
    out.kind = InitialKind::gaussian;
    out.value = p[0];
    out.amplitude = p[1];
    out.center = p[2];
    out.width = p[3];
  } else if (kind == "tabulated") {
    out.kind = InitialKind::tabulated;
    split_table(p, out.xs, out.ys, where);
  } else if (kind == "random") {
    expect_params(p, 2, 2, where);
    out.kind = InitialKind::random;
    out.value = p[0];
    out.amplitude = p[1] - p[0];
  } else {
    config_error(s.where(prefix + ".kind") + ": unknown initial kind '" + kind + "'");
  }
  return out;
}

Normalization read_normalization(const std::string& text, const std::string& where) {
  if (text == "total_mass") return Normalization::total_mass;
  if (text == "weighted_mass") return Normalization::weighted_mass;
  config_error(where + ": expected total_mass or weighted_mass");
}

const char* potential_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::linear: return "linear";
    case PotentialKind::cosine: return "cosine";
    case PotentialKind::sawtooth_smoothed: return "sawtooth_smoothed";
    case PotentialKind::tabulated: return "tabulated";
  }
  return "zero";
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ", ";
    out += format_double(values[k]);
  }
  return out;
}

std::vector<double> interleave(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out.push_back(xs[k]);
    out.push_back(ys[k]);
  }
  return out;
}

std::vector<double> potential_params(const PotentialSpec& p) {
  switch (p.kind) {
    case PotentialKind::zero: return {};
    case PotentialKind::linear: return {p.slope, p.slope_y};
    case PotentialKind::cosine: return {p.amplitude, p.period, p.shift};
    case PotentialKind::sawtooth_smoothed:
      return {p.amplitude, p.period, p.shift, static_cast<double>(p.harmonics)};
    case PotentialKind::tabulated: return interleave(p.xs, p.ys);
  }
  return {};
}

void write_initial(std::ostream& os, const std::string& prefix, const InitialSpec& s) {
  const char* kind = "constant";
  std::vector<double> params;
  switch (s.kind) {
    case InitialKind::constant: params = {s.value}; break;
    case InitialKind::cosine:
      kind = "cosine";
      params = {s.value, s.amplitude, s.period, s.shift};
      break;
    case InitialKind::gaussian:
      kind = "gaussian";
      params = {s.value, s.amplitude, s.center, s.width};
      break;
    case InitialKind::tabulated:
      kind = "tabulated";
      params = interleave(s.xs, s.ys);
      break;
    case InitialKind::random:
      kind = "random";
      params = {s.value, s.value + s.amplitude};
      break;
  }
  os << prefix << ".kind = " << kind << '\n' << prefix << ".params = " << join(params) << '\n';
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.line() << ": parse error: " << e.message();
    config_error(os.str());
  }

  std::map<std::string, const pt::ptree*> sections;
  for (const auto& [name, tree] : root) {
    if (tree.empty() && !tree.data().empty()) {
      config_error("key '" + name + "' appears outside any section");
    }
    sections[name] = &tree;
  }
  auto section = [&](const std::string& name) {
    auto it = sections.find(name);
    const pt::ptree* tree = it == sections.end() ? nullptr : it->second;
    sections.erase(name);
    return Section(tree, name);
  };

  RunConfig cfg;

  Section domain = section("domain");
  const long dim = domain.integer("dim", 1);
  if (dim != 1 && dim != 2) config_error(domain.where("dim") + ": must be 1 or 2");
  const Axis x{domain.number("x_lo", 0.0), domain.number("x_hi", 1.0),
               static_cast<int>(domain.integer("nx", 64))};
  if (dim == 1) {
    cfg.spec.grid = Grid::interval(x.lo, x.hi, x.n_cells);
    for (const char* key : {"y_lo", "y_hi", "ny"}) {
      if (domain.has(key)) config_error(domain.where(key) + ": only valid for dim = 2");
    }
  } else {
    const Axis y{domain.number("y_lo", 0.0), domain.number("y_hi", 1.0),
                 static_cast<int>(domain.integer("ny", 64))};
    cfg.spec.grid = Grid::rectangle(x, y);
  }
  domain.finish();

  std::vector<InitialSpec> second;
  for (int i = 1;; ++i) {
    const std::string name = "species." + std::to_string(i);
    if (!sections.count(name)) break;
    Section s = section(name);
    SpeciesSpec sp;
    sp.sigma = s.number("sigma");
    sp.alpha = s.number("alpha", 1.0);
    sp.potential = read_potential(s);
    sp.reaction = read_reaction(s);
    cfg.spec.species.push_back(sp);
    cfg.spec.initial.push_back(read_initial(s, "initial"));
    if (s.has("initial_b.kind") || s.has("initial_b.params")) {
      second.push_back(read_initial(s, "initial_b"));
    }
    s.finish();
  }
  const int n = cfg.spec.n();
  if (n == 0) config_error("no [species.1] section");
  if (!second.empty()) {
    if (static_cast<int>(second.size()) != n) {
      config_error("initial_b must be given for every species or none");
    }
    cfg.initial_b = std::move(second);
  }

  Section coupling = section("coupling");
  cfg.spec.coupling.lambda = Eigen::MatrixXd::Zero(n, n);
  if (n > 1 || coupling.has("row.1")) {
    for (int i = 0; i < n; ++i) {
      const std::string key = "row." + std::to_string(i + 1);
      if (!coupling.has(key)) config_error(coupling.where(key) + ": required key missing");
      const std::vector<double> row = coupling.list(key);
      if (static_cast<int>(row.size()) != n) {
        config_error(coupling.where(key) + ": expected " + std::to_string(n) + " entries");
      }
      for (int j = 0; j < n; ++j) cfg.spec.coupling.lambda(i, j) = row[j];
    }
  }
  coupling.finish();

  Section time = section("time");
  cfg.time.dt = time.number("dt", cfg.time.dt);
  cfg.time.t_end = time.number("t_end", cfg.time.t_end);
  cfg.time.stride = static_cast<int>(time.integer("stride", cfg.time.stride));
  cfg.time.solver_tol = time.number("solver_tol", cfg.time.solver_tol);
  cfg.time.max_iterations = static_cast<int>(time.integer("max_iterations", cfg.time.max_iterations));
  time.finish();
  check_step_config(cfg.time);

  Section output = section("output");
  cfg.out_dir = output.text("dir", cfg.out_dir);
  output.finish();

  Section steady = section("steady");
  cfg.steady.normalization = read_normalization(
      steady.text("normalization", "total_mass"), steady.where("normalization"));
  cfg.steady.tol = steady.number("tol", cfg.steady.tol);
  cfg.steady.max_iterations = static_cast<int>(steady.integer("max_iterations", cfg.steady.max_iterations));
  cfg.steady.shift_factor = steady.number("shift_factor", cfg.steady.shift_factor);
  steady.finish();

  Section verify = section("verify");
  cfg.threshold = verify.number("threshold", cfg.threshold);
  cfg.oracle_t = verify.number("oracle_t", cfg.oracle_t);
  verify.finish();

  if (!sections.empty()) config_error("unknown section [" + sections.begin()->first + "]");

  const ValidationReport report = validate(cfg.spec);
  if (!report.ok()) config_error("problem fails validation:\n" + report.summary());
  if (cfg.initial_b) {
    ProblemSpec other = cfg.spec;
    other.initial = *cfg.initial_b;
    const ValidationReport rb = validate(other);
    if (!rb.ok()) config_error("initial_b fails validation:\n" + rb.summary());
  }
  return cfg;
}

void write_effective_config(std::ostream& os, const RunConfig& cfg) {
  const Grid& g = cfg.spec.grid;
  os << "[domain]\ndim = " << g.dim() << '\n'
     << "x_lo = " << format_double(g.axis(0).lo) << '\n'
     << "x_hi = " << format_double(g.axis(0).hi) << '\n'
     << "nx = " << g.axis(0).n_cells << '\n';
  if (g.dim() == 2) {
    os << "y_lo = " << format_double(g.axis(1).lo) << '\n'
       << "y_hi = " << format_double(g.axis(1).hi) << '\n'
       << "ny = " << g.axis(1).n_cells << '\n';
  }
  for (int i = 0; i < cfg.spec.n(); ++i) {
    const SpeciesSpec& s = cfg.spec.species[i];
    os << "\n[species." << i + 1 << "]\n"
       << "sigma = " << format_double(s.sigma) << '\n'
       << "alpha = " << format_double(s.alpha) << '\n'
       << "potential.kind = " << potential_name(s.potential.kind) << '\n'
       << "potential.params = " << join(potential_params(s.potential)) << '\n';
    if (s.reaction.kind == ReactionKind::linear) {
      os << "reaction.kind = linear\nreaction.params =\n";
    } else {
      os << "reaction.kind = power\nreaction.params = " << format_double(s.reaction.exponent)
         << '\n';
    }
    write_initial(os, "initial", cfg.spec.initial[i]);
    if (cfg.initial_b) write_initial(os, "initial_b", (*cfg.initial_b)[i]);
  }
  os << "\n[coupling]\n";
  for (int i = 0; i < cfg.spec.n(); ++i) {
    std::vector<double> row(cfg.spec.n());
    for (int j = 0; j < cfg.spec.n(); ++j) row[j] = cfg.spec.coupling.lambda(i, j);
    os << "row." << i + 1 << " = " << join(row) << '\n';
  }
  os << "\n[time]\n"
     << "dt = " << format_double(cfg.time.dt) << '\n'
     << "t_end = " << format_double(cfg.time.t_end) << '\n'
     << "stride = " << cfg.time.stride << '\n'
     << "solver_tol = " << format_double(cfg.time.solver_tol) << '\n'
     << "max_iterations = " << cfg.time.max_iterations << '\n';
  os << "\n[output]\ndir = " << cfg.out_dir << '\n';
  os << "\n[steady]\n"
     << "normalization = " << to_string(cfg.steady.normalization) << '\n'
     << "tol = " << format_double(cfg.steady.tol) << '\n'
     << "max_iterations = " << cfg.steady.max_iterations << '\n'
     << "shift_factor = " << format_double(cfg.steady.shift_factor) << '\n';
  os << "\n[verify]\n"
     << "threshold = " << format_double(cfg.threshold) << '\n'
     << "oracle_t = " << format_double(cfg.oracle_t) << '\n';
}

}  // namespace motorflux::cli
