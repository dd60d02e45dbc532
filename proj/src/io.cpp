#include "spheremix/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spheremix/errors.hpp"

namespace spheremix {

namespace {

std::string join_levels(const std::vector<int>& levels) {
  std::string s;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(levels[i]);
  }
  return s;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::vector<double> number_array(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw FormatError(std::string(what) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

int integer_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw FormatError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::ostringstream csv_stream() {
  std::ostringstream os;
  os.precision(17);
  return os;
}

}  // namespace

Json mixture_to_json(const VmfMixture& mix) {
  Json comps = Json::array();
  for (std::size_t h = 0; h < mix.size(); ++h) {
    const auto mu = mix.mean(h);
    comps.push_back({{"mu", std::vector<double>(mu.begin(), mu.end())}, {"kappa", mix.kappa(h)}});
  }
  return Json{{"m", mix.m()}, {"components", std::move(comps)}, {"weights", mix.weights()}};
}

VmfMixture mixture_from_json(const Json& j) {
  const int m = integer_field(j, "m");
  const Json& comps = field(j, "components");
  if (!comps.is_array()) throw FormatError("components must be an array");
  std::vector<VmfComponent> components;
  for (const auto& c : comps) {
    auto mu = number_array(field(c, "mu"), "mu");
    if (mu.size() != static_cast<std::size_t>(m) + 1) throw FormatError("mu must have m+1 coordinates");
    const Json& kappa = field(c, "kappa");
    if (!kappa.is_number()) throw FormatError("kappa must be a number");
    // stored means are already unit length; UnitVector renormalization is then a no-op up to rounding
    components.push_back({UnitVector(std::move(mu)), kappa.get<double>()});
  }
  return VmfMixture(m, std::move(components), number_array(field(j, "weights"), "weights"));
}

Json partition_to_json(const SphericalPartition& p) {
  Json blocks = Json::array();
  for (const auto& b : p.blocks) {
    Json ivs = Json::array();
    for (const auto& iv : b.intervals) ivs.push_back({iv.lo, iv.hi});
    blocks.push_back({{"intervals", std::move(ivs)}});
  }
  return Json{{"m", p.m}, {"blocks", std::move(blocks)}, {"measures", p.measures}};
}

SphericalPartition partition_from_json(const Json& j) {
  SphericalPartition p;
  p.m = integer_field(j, "m");
  const Json& blocks = field(j, "blocks");
  if (!blocks.is_array()) throw FormatError("blocks must be an array");
  for (const auto& b : blocks) {
    CoordinateBlock block;
    for (const auto& iv : field(b, "intervals")) {
      const auto v = number_array(iv, "interval");
      if (v.size() != 2) throw FormatError("interval must be [lo, hi]");
      block.intervals.push_back({v[0], v[1]});
    }
    if (block.intervals.size() != static_cast<std::size_t>(p.m)) throw FormatError("block needs m intervals");
    p.blocks.push_back(std::move(block));
  }
  p.measures = number_array(field(j, "measures"), "measures");
  if (p.measures.size() != p.blocks.size()) throw FormatError("one measure per block required");
  return p;
}

Json report_to_json(const ApproximationReport& r) {
  Json modes = Json::object();
  std::size_t counts[3] = {0, 0, 0};
  for (BlockMode mode : r.block_modes) ++counts[static_cast<int>(mode)];
  for (int i = 0; i < 3; ++i) modes[to_string(static_cast<BlockMode>(i))] = counts[i];
  Json per_block = Json::array();
  for (BlockMode mode : r.block_modes) per_block.push_back(to_string(mode));

  Json history = Json::array();
  for (const auto& s : r.history) {
    history.push_back({{"stage", s.stage},
                       {"n", s.n},
                       {"levels", s.levels},
                       {"blocks", s.blocks},
                       {"components", s.components},
                       {"fallbacks", s.fallbacks},
                       {"sup_error", s.sup_error},
                       {"convolution_term", s.convolution_term},
                       {"discretization_term", s.discretization_term},
                       {"accepted", s.accepted}});
  }
  double weight_sum = 0.0;
  for (double w : r.mixture.weights()) weight_sum += w;
  return Json{{"target", r.target},
              {"m", r.m},
              {"delta", r.delta},
              {"converged", r.converged},
              {"n", r.n},
              {"N", r.mixture.size()},
              {"levels", r.levels},
              {"sup_error", r.sup_error},
              {"sup_error_point", r.sup_error_point},
              {"convolution_error", r.convolution_error},
              {"discretization_error", r.discretization_error},
              {"weight_sum", weight_sum},
              {"grid", {{"kind", r.grid_kind}, {"points", r.grid_points}, {"mesh_norm", r.mesh_norm}}},
              {"block_modes", modes},
              {"block_mode_per_block", per_block},
              {"history", history},
              {"mixture", mixture_to_json(r.mixture)},
              {"partition", partition_to_json(r.partition)},
              {"disclaimer", r.disclaimer}};
}

std::string history_csv(const std::vector<StageRecord>& history) {
  auto os = csv_stream();
  os << "stage,n,levels,blocks,components,fallbacks,sup_error,convolution_term,discretization_term,accepted\n";
  for (const auto& s : history) {
    os << s.stage << ',' << s.n << ',' << join_levels(s.levels) << ',' << s.blocks << ',' << s.components << ','
       << s.fallbacks << ',' << s.sup_error << ',' << s.convolution_term << ',' << s.discretization_term << ','
       << (s.accepted ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string study_csv(const std::vector<StudyRow>& rows) {
  auto os = csv_stream();
  os << "n,levels,blocks,sup_error,convolution_term,discretization_term\n";
  for (const auto& r : rows) {
    os << r.n << ',' << join_levels(r.levels) << ',' << r.blocks << ',' << r.sup_error << ',' << r.convolution_term
       << ',' << r.discretization_term << '\n';
  }
  return os.str();
}

std::vector<std::vector<double>> parse_points_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    bool numeric = true;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      const std::string tok = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw FormatError("points CSV: line " + std::to_string(line_no) + " is not a row of numbers");
    }
    if (row.size() < 2) throw FormatError("points CSV: line " + std::to_string(line_no) + " has fewer than 2 values");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("points CSV: line " + std::to_string(line_no) + " has a different column count");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string points_csv(int m, const std::vector<UnitVector>& points) {
  auto os = csv_stream();
  for (int i = 0; i <= m; ++i) os << (i ? ",x" : "x") << i;
  os << '\n';
  for (const auto& p : points) {
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << '\n';
  }
  return os.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

}  // namespace spheremix
