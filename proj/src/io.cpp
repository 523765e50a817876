#include "mixent/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mixent/errors.hpp"

namespace mixent::io {
namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("malformed JSON document");
  return doc;
}

Label parse_label(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Label{j.get<std::int64_t>()};
  if (j.is_string()) return Label{j.get<std::string>()};
  throw ParseError(where + ": label must be an integer or a string");
}

double parse_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

double require_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return parse_number(j.at(key), where + "." + key);
}

// [lo, hi] with null for an unbounded end.
Interval parse_interval(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ParseError(where + ": interval must be [lo, hi]");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  Interval iv;
  iv.lo = j[0].is_null() ? -inf : parse_number(j[0], where + "[0]");
  iv.hi = j[1].is_null() ? inf : parse_number(j[1], where + "[1]");
  return iv;
}

std::pair<Eigen::ArrayXd, Eigen::ArrayXd> parse_knots(const json& j,
                                                      const std::string& where) {
  if (!j.is_array() || j.size() < 2) {
    throw ParseError(where + ": knots must be a list of >= 2 [y, value] pairs");
  }
  Eigen::ArrayXd ys(j.size()), vs(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& pair = j[i];
    if (!pair.is_array() || pair.size() != 2) {
      throw ParseError(where + "[" + std::to_string(i) + "]: expected [y, value]");
    }
    ys[static_cast<Eigen::Index>(i)] = parse_number(pair[0], where);
    vs[static_cast<Eigen::Index>(i)] = parse_number(pair[1], where);
  }
  return {std::move(ys), std::move(vs)};
}

Density parse_density(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": density must be an object");
  if (!j.contains("family")) throw ParseError(where + ": missing field 'family'");
  const std::string family = j.at("family").is_string()
                                 ? j.at("family").get<std::string>()
                                 : throw ParseError(where + ".family: expected a string");
  try {
    if (family == "uniform") {
      return Density::uniform(require_number(j, "a", where),
                              require_number(j, "b", where));
    }
    if (family == "exponential") {
      double origin = 0.0;
      if (j.contains("origin")) {
        origin = parse_number(j.at("origin"), where + ".origin");
      } else if (j.contains("support")) {
        origin = parse_interval(j.at("support"), where + ".support").lo;
      }
      return Density::exponential(require_number(j, "rate", where), origin);
    }
    if (family == "gaussian") {
      return Density::gaussian(require_number(j, "mean", where),
                               require_number(j, "variance", where));
    }
    if (family == "piecewise-linear") {
      if (!j.contains("knots")) throw ParseError(where + ": missing field 'knots'");
      auto [ys, vs] = parse_knots(j.at("knots"), where + ".knots");
      return Density::piecewise_linear(std::move(ys), std::move(vs));
    }
  } catch (const InvalidArgumentError& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ".family: unknown family '" + family + "'");
}

json density_to_json(const Density& density) {
  json j;
  auto support_json = [](Interval s) {
    json iv = json::array();
    iv.push_back(std::isfinite(s.lo) ? json(s.lo) : json(nullptr));
    iv.push_back(std::isfinite(s.hi) ? json(s.hi) : json(nullptr));
    return iv;
  };
  switch (density.family()) {
    case Density::Family::Uniform: {
      const auto p = density.uniform_params();
      j = {{"family", "uniform"}, {"a", p.a}, {"b", p.b}};
      break;
    }
    case Density::Family::Exponential: {
      const auto p = density.exponential_params();
      j = {{"family", "exponential"}, {"rate", p.rate}, {"origin", p.origin}};
      break;
    }
    case Density::Family::Gaussian: {
      const auto p = density.gaussian_params();
      j = {{"family", "gaussian"}, {"mean", p.mean}, {"variance", p.variance}};
      break;
    }
    case Density::Family::PiecewiseLinear: {
      json knots = json::array();
      for (Eigen::Index i = 0; i < density.knots().size(); ++i) {
        knots.push_back({density.knots()[i], density.values()[i]});
      }
      j = {{"family", "piecewise-linear"}, {"knots", std::move(knots)}};
      break;
    }
    default: {
      // Mixtures and custom evaluators are in-memory only: serialize a
      // tabulated snapshot over the integration window.
      const Interval window = density.integration_interval();
      const Density tab =
          Density::tabulate([&](double y) { return density(y); }, window, 4096);
      return density_to_json(tab);
    }
  }
  j["support"] = support_json(density.support());
  return j;
}

json label_to_json(const Label& label) {
  if (std::holds_alternative<std::int64_t>(label)) {
    return json(std::get<std::int64_t>(label));
  }
  return json(std::get<std::string>(label));
}

}  // namespace

MixedPairDistribution parse_distribution(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("atoms") || !doc.at("atoms").is_array()) {
    throw ParseError("distribution spec needs a top-level 'atoms' array");
  }
  const json& atoms_json = doc.at("atoms");
  if (atoms_json.empty()) throw ParseError("atoms: must be nonempty");

  double tail_mass = 0.0;
  if (doc.contains("tail_mass")) {
    tail_mass = parse_number(doc.at("tail_mass"), "tail_mass");
  }

  std::vector<Atom> atoms;
  atoms.reserve(atoms_json.size());
  double total = tail_mass;
  for (std::size_t i = 0; i < atoms_json.size(); ++i) {
    const std::string where = "atoms[" + std::to_string(i) + "]";
    const json& a = atoms_json[i];
    if (!a.is_object()) throw ParseError(where + ": expected an object");
    if (!a.contains("label")) throw ParseError(where + ": missing field 'label'");
    if (!a.contains("density")) throw ParseError(where + ": missing field 'density'");
    const double mass = require_number(a, "mass", where);
    total += mass;
    atoms.push_back({parse_label(a.at("label"), where + ".label"), mass,
                     parse_density(a.at("density"), where + ".density")});
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ParseError("atom masses (plus tail_mass) must sum to 1 +- 1e-9, got " +
                     std::to_string(total));
  }
  try {
    return MixedPairDistribution(std::move(atoms), tail_mass);
  } catch (const InvalidArgumentError& e) {
    throw ParseError(std::string("invalid distribution: ") + e.what());
  }
}

MixedPairDistribution load_distribution(const std::string& path) {
  return parse_distribution(slurp(path));
}

std::string distribution_to_json(const MixedPairDistribution& dist) {
  json doc;
  doc["atoms"] = json::array();
  for (const Atom& atom : dist.atoms()) {
    doc["atoms"].push_back({{"label", label_to_json(atom.label)},
                            {"mass", atom.mass},
                            {"density", density_to_json(atom.shape)}});
  }
  if (dist.truncation_tail_mass() > 0.0) {
    doc["tail_mass"] = dist.truncation_tail_mass();
  }
  return doc.dump(2);
}

MixedPairMap parse_map(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("regions") || !doc.at("regions").is_array()) {
    throw ParseError("map spec needs a top-level 'regions' array");
  }
  std::vector<MapRegion> regions;
  const json& regions_json = doc.at("regions");
  for (std::size_t i = 0; i < regions_json.size(); ++i) {
    const std::string where = "regions[" + std::to_string(i) + "]";
    const json& r = regions_json[i];
    if (!r.is_object()) throw ParseError(where + ": expected an object");
    for (const char* key : {"input_label", "interval", "output_label", "map"}) {
      if (!r.contains(key)) {
        throw ParseError(where + ": missing field '" + key + "'");
      }
    }
    MapRegion region;
    region.input_label = parse_label(r.at("input_label"), where + ".input_label");
    region.interval = parse_interval(r.at("interval"), where + ".interval");
    region.output_label = parse_label(r.at("output_label"), where + ".output_label");
    const json& m = r.at("map");
    if (!m.is_object() || !m.contains("type") || !m.at("type").is_string()) {
      throw ParseError(where + ".map: needs a 'type' of 'affine' or 'tabulated'");
    }
    const std::string type = m.at("type").get<std::string>();
    try {
      if (type == "affine") {
        region.map = RegionMap1d::affine(require_number(m, "slope", where + ".map"),
                                         require_number(m, "intercept", where + ".map"));
      } else if (type == "tabulated") {
        if (!m.contains("knots")) throw ParseError(where + ".map: missing 'knots'");
        auto [xs, fs] = parse_knots(m.at("knots"), where + ".map.knots");
        region.map = RegionMap1d::tabulated(std::move(xs), std::move(fs));
      } else {
        throw ParseError(where + ".map.type: unknown type '" + type + "'");
      }
      regions.push_back(std::move(region));
    } catch (const InvalidArgumentError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  try {
    return MixedPairMap(std::move(regions));
  } catch (const InvalidArgumentError& e) {
    throw ParseError(std::string("invalid map: ") + e.what());
  }
}

MixedPairMap load_map(const std::string& path) { return parse_map(slurp(path)); }

CTMCSpec parse_chain(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("chain spec must be an object");
  const double lambda = require_number(doc, "lambda", "chain");
  if (!doc.contains("P") || !doc.at("P").is_array()) {
    throw ParseError("chain spec needs a row-major matrix 'P'");
  }
  const json& rows = doc.at("P");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ParseError("P[" + std::to_string(i) + "]: matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      P(i, j) = parse_number(row[static_cast<std::size_t>(j)],
                             "P[" + std::to_string(i) + "]");
    }
  }
  try {
    if (doc.contains("stationary") && doc.at("stationary").is_boolean() &&
        doc.at("stationary").get<bool>()) {
      return CTMCSpec::with_stationary_start(lambda, std::move(P));
    }
    if (!doc.contains("initial") || !doc.at("initial").is_array()) {
      throw ParseError("chain spec needs 'initial' or 'stationary': true");
    }
    const json& init = doc.at("initial");
    Eigen::VectorXd initial(static_cast<Eigen::Index>(init.size()));
    for (std::size_t i = 0; i < init.size(); ++i) {
      initial[static_cast<Eigen::Index>(i)] = parse_number(init[i], "initial");
    }
    return CTMCSpec(lambda, std::move(P), std::move(initial));
  } catch (const InvalidArgumentError& e) {
    throw ParseError(std::string("invalid chain: ") + e.what());
  } catch (const ReducibleChainError& e) {
    throw ParseError(std::string("invalid chain: ") + e.what());
  }
}

CTMCSpec load_chain(const std::string& path) { return parse_chain(slurp(path)); }

std::vector<double> load_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<double> samples;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    try {
      std::size_t consumed = 0;
      const double value = std::stod(line, &consumed);
      samples.push_back(value);
      (void)consumed;
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_number) +
                       ": expected one numeric value per line");
    }
  }
  if (samples.empty()) throw ParseError(path + ": no samples found");
  return samples;
}

std::vector<Label> load_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<Label> labels;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    try {
      std::size_t consumed = 0;
      const long long v = std::stoll(line, &consumed);
      if (consumed == line.size()) {
        labels.emplace_back(std::int64_t{v});
        continue;
      }
    } catch (const std::exception&) {
    }
    labels.emplace_back(line);
  }
  if (labels.empty()) throw ParseError(path + ": no samples found");
  return labels;
}

void write_path_csv(std::ostream& out, const SamplePath& path) {
  out << "time,mark\n";
  char buffer[64];
  for (std::size_t i = 0; i < path.jumps.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", path.jumps[i]);
    out << buffer << ',';
    if (i < path.marks.size()) out << path.marks[i];
    out << '\n';
  }
}

}  // namespace mixent::io
