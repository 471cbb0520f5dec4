#include "profdec/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "profdec/errors.hpp"

namespace profdec::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

const json& at(const json& j, const char* key) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing key '") + key + "'");
  return *it;
}

double real_of(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  throw ValidationError("expected a real number or \"inf\"");
}

double real_at(const json& j, const char* key) {
  try {
    return real_of(at(j, key));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(key) + ": " + e.what());
  }
}

std::int64_t int_of(const json& j) {
  if (!j.is_number_integer()) throw ValidationError("expected an integer");
  return j.get<std::int64_t>();
}

std::int64_t int_at(const json& j, const char* key) {
  try {
    return int_of(at(j, key));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(key) + ": " + e.what());
  }
}

std::size_t size_at(const json& j, const char* key) {
  const auto v = int_at(j, key);
  if (v < 0) throw ValidationError(std::string(key) + ": must be >= 0");
  return static_cast<std::size_t>(v);
}

bool bool_at(const json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_boolean()) throw ValidationError(std::string(key) + ": expected a boolean");
  return v.get<bool>();
}

std::string string_at(const json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_string()) throw ValidationError(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

const json& array_at(const json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_array()) throw ValidationError(std::string(key) + ": expected an array");
  return v;
}

json reals(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(real(x));
  return out;
}

std::vector<double> reals_of(const json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of reals");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(real_of(v));
  return out;
}

std::vector<std::size_t> sizes_of(const json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of indices");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    const auto x = int_of(v);
    if (x < 0) throw ValidationError("negative index");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

// Dyadic vectors travel as integer numerators plus an explicit denominator exponent.
void put_vec(json& j, const char* key, const char* exp_key, const DyadicVec& v) {
  j[key] = json(std::vector<std::int64_t>(v.numerators().begin(), v.numerators().end()));
  j[exp_key] = v.denom_exp();
}

DyadicVec vec_at(const json& j, const char* key, const char* exp_key) {
  std::vector<std::int64_t> nums;
  for (const auto& v : array_at(j, key)) nums.push_back(int_of(v));
  const auto e = j.contains(exp_key) ? int_at(j, exp_key) : 0;
  if (e < 0) throw ValidationError(std::string(exp_key) + ": must be >= 0");
  return DyadicVec(std::move(nums), e);
}

json affine(const DyadicAffine& t) {
  json j;
  j["j"] = t.scale;
  put_vec(j, "k", "denom_exp", t.shift);
  return j;
}

DyadicAffine affine_of(const json& j) { return {int_at(j, "j"), vec_at(j, "k", "denom_exp")}; }

json index_json(const WaveletIndex& idx) {
  json j = affine({idx.scale, idx.shift});
  j["i"] = idx.gen;
  return j;
}

WaveletIndex index_of(const json& j, std::size_t dim) {
  const auto gen = int_at(j, "i");
  if (gen < 1 || gen > std::numeric_limits<int>::max()) throw ValidationError("i: generator out of range");
  WaveletIndex idx{static_cast<int>(gen), int_at(j, "j"), vec_at(j, "k", "denom_exp")};
  check_index(idx, dim);
  return idx;
}

json field_json(const CoeffField& f) {
  json j;
  j["dimension"] = f.dim();
  j["p"] = real(f.p());
  json entries = json::array();
  for (const auto& [idx, amp] : f.entries()) {
    json e = index_json(idx);
    e["amp"] = amp;
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

CoeffField field_of(const json& j) {
  const auto dim = size_at(j, "dimension");
  if (dim < 1 || dim > 30) throw ValidationError("dimension must lie in [1, 30]");
  CoeffField f(dim, real_at(j, "p"));
  for (const auto& e : array_at(j, "entries")) {
    const auto amp = real_at(e, "amp");
    if (amp == 0.0) throw ValidationError("zero amplitude entry");
    f.insert(index_of(e, dim), amp);
  }
  return f;
}

json config_json(const ExtractConfig& cfg) {
  json j;
  j["max_iterations"] = cfg.max_iterations;
  j["tail_window"] = cfg.tail_window;
  j["conv_tol"] = real(cfg.conv_tol);
  j["bound_threshold"] = real(cfg.bound_threshold);
  j["stop_epsilon"] = real(cfg.stop_epsilon);
  json in, rem;
  in["p"] = real(cfg.input.p);
  in["a"] = real(cfg.input.a);
  in["q"] = real(cfg.input.q);
  if (cfg.input.mode == SpaceMode::lp) {
    in["mode"] = "lp";
    rem["r"] = real(cfg.remainder.inner);
    rem["q"] = real(cfg.remainder.outer);
  } else {
    in["mode"] = "besov";
    rem["b"] = real(cfg.remainder.inner);
    rem["r"] = real(cfg.remainder.outer);
  }
  j["input_space"] = std::move(in);
  j["remainder_space"] = std::move(rem);
  return j;
}

ExtractConfig config_of(const json& j) {
  ExtractConfig cfg;
  auto int_field = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    const auto v = int_at(j, key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      throw ValidationError(std::string(key) + ": out of range");
    out = static_cast<int>(v);
  };
  auto real_field = [&](const json& obj, const char* key, double& out) {
    if (obj.contains(key)) out = real_at(obj, key);
  };
  int_field("max_iterations", cfg.max_iterations);
  int_field("tail_window", cfg.tail_window);
  real_field(j, "conv_tol", cfg.conv_tol);
  real_field(j, "bound_threshold", cfg.bound_threshold);
  real_field(j, "stop_epsilon", cfg.stop_epsilon);
  if (j.contains("input_space")) {
    const auto& in = j["input_space"];
    const auto mode = in.contains("mode") ? string_at(in, "mode") : "lp";
    if (mode == "lp")
      cfg.input.mode = SpaceMode::lp;
    else if (mode == "besov")
      cfg.input.mode = SpaceMode::besov;
    else
      throw ValidationError("input_space.mode must be \"lp\" or \"besov\"");
    real_field(in, "p", cfg.input.p);
    real_field(in, "a", cfg.input.a);
    real_field(in, "q", cfg.input.q);
  }
  if (j.contains("remainder_space")) {
    const auto& rem = j["remainder_space"];
    if (cfg.input.mode == SpaceMode::lp) {
      real_field(rem, "r", cfg.remainder.inner);
      real_field(rem, "q", cfg.remainder.outer);
    } else {
      real_field(rem, "b", cfg.remainder.inner);
      real_field(rem, "r", cfg.remainder.outer);
    }
  }
  validate(cfg);
  return cfg;
}

json law_json(const ParamLaw& law) {
  json j;
  j["kind"] = to_string(law.kind);
  j["j0"] = law.base.scale;
  put_vec(j, "k0", "k0_denom_exp", law.base.shift);
  put_vec(j, "velocity", "velocity_denom_exp", law.velocity);
  j["scale_step"] = law.scale_step;
  return j;
}

ParamLaw law_of(const json& j, std::size_t dim) {
  ParamLaw law;
  law.kind = law_kind_from_string(string_at(j, "kind"));
  law.base.scale = j.contains("j0") ? int_at(j, "j0") : 0;
  law.base.shift = j.contains("k0") ? vec_at(j, "k0", "k0_denom_exp") : DyadicVec::zeros(dim);
  law.velocity = j.contains("velocity") ? vec_at(j, "velocity", "velocity_denom_exp") : DyadicVec::zeros(dim);
  if (j.contains("scale_step")) {
    const auto s = int_at(j, "scale_step");
    if (s < -1 || s > 1) throw ValidationError("scale_step must be -1, 0 or 1");
    law.scale_step = static_cast<int>(s);
  }
  return law;
}

json spec_json(const SyntheticSpec& spec) {
  json j;
  j["dimension"] = spec.dim;
  j["p"] = real(spec.p);
  j["n_count"] = spec.n_count;
  j["seed"] = spec.seed;
  json profiles = json::array();
  for (const auto& prof : spec.profiles) {
    json pj;
    pj["entries"] = field_json(prof.profile)["entries"];
    pj["law"] = law_json(prof.law);
    profiles.push_back(std::move(pj));
  }
  j["profiles"] = std::move(profiles);
  if (spec.noise) {
    const auto& nz = *spec.noise;
    j["noise"] = {{"epsilon", real(nz.epsilon)},
                  {"count", nz.count},
                  {"scale_min", nz.scale_min},
                  {"scale_max", nz.scale_max},
                  {"shift_radius", nz.shift_radius}};
  } else {
    j["noise"] = nullptr;
  }
  return j;
}

SyntheticSpec spec_of(const json& j) {
  SyntheticSpec spec;
  spec.dim = size_at(j, "dimension");
  if (spec.dim < 1 || spec.dim > 30) throw ValidationError("dimension must lie in [1, 30]");
  spec.p = real_at(j, "p");
  spec.n_count = size_at(j, "n_count");
  if (j.contains("seed")) {
    const auto& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw ValidationError("seed must be a nonnegative integer");
    spec.seed = s.get<std::uint64_t>();
  }
  for (const auto& pj : array_at(j, "profiles")) {
    json fj;
    fj["dimension"] = spec.dim;
    fj["p"] = real(spec.p);
    fj["entries"] = array_at(pj, "entries");
    spec.profiles.push_back({field_of(fj), law_of(at(pj, "law"), spec.dim)});
  }
  if (j.contains("noise") && !j["noise"].is_null()) {
    const auto& nj = j["noise"];
    NoiseSpec nz;
    nz.epsilon = real_at(nj, "epsilon");
    const auto count = int_at(nj, "count");
    if (count < 0 || count > std::numeric_limits<int>::max()) throw ValidationError("noise count out of range");
    nz.count = static_cast<int>(count);
    if (nj.contains("scale_min")) nz.scale_min = int_at(nj, "scale_min");
    if (nj.contains("scale_max")) nz.scale_max = int_at(nj, "scale_max");
    if (nj.contains("shift_radius")) nz.shift_radius = int_at(nj, "shift_radius");
    spec.noise = nz;
  }
  return spec;
}

json decomposition_json(const Decomposition& dec) {
  json j;
  j["dimension"] = dec.dim;
  j["p"] = real(dec.p);
  j["sequence_length"] = dec.sequence_length;
  j["retained"] = dec.retained;
  j["input_bound"] = real(dec.input_bound);
  j["stop_reason"] = dec.stop_reason;
  json groups = json::array();
  for (const auto& g : dec.groups) {
    json gj;
    json anchors = json::array();
    for (const auto& [n, t] : g.anchors) {
      json a = affine(t);
      a["n"] = n;
      anchors.push_back(std::move(a));
    }
    gj["anchors"] = std::move(anchors);
    json members = json::array();
    for (const auto& m : g.members) {
      members.push_back({{"rank", m.rank},
                         {"i", m.gen},
                         {"relative", affine(m.relative)},
                         {"amplitude", real(m.amplitude)},
                         {"spread", real(m.spread)}});
    }
    gj["members"] = std::move(members);
    gj["profile"] = field_json(g.profile)["entries"];
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  json steps = json::array();
  for (const auto& s : dec.steps) {
    json picks = json::array();
    for (const auto& [n, e] : s.picks) {
      json pj = index_json(e.index);
      pj["n"] = n;
      pj["amp"] = e.amplitude;
      picks.push_back(std::move(pj));
    }
    steps.push_back({{"rank", s.rank},
                     {"i", s.gen},
                     {"amplitude", real(s.amplitude)},
                     {"spread", real(s.spread)},
                     {"group", s.group},
                     {"attach", s.attach},
                     {"picks", std::move(picks)}});
  }
  j["steps"] = std::move(steps);
  json diags = json::array();
  for (const auto& d : dec.diagnostics) diags.push_back({{"kind", d.kind}, {"rank", d.rank}, {"message", d.message}});
  j["diagnostics"] = std::move(diags);
  return j;
}

int small_int_at(const json& j, const char* key) {
  const auto v = int_at(j, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ValidationError(std::string(key) + ": out of range");
  return static_cast<int>(v);
}

Decomposition decomposition_of(const json& j) {
  Decomposition dec;
  dec.dim = size_at(j, "dimension");
  if (dec.dim < 1 || dec.dim > 30) throw ValidationError("dimension must lie in [1, 30]");
  dec.p = real_at(j, "p");
  dec.sequence_length = size_at(j, "sequence_length");
  dec.retained = sizes_of(at(j, "retained"));
  dec.input_bound = real_at(j, "input_bound");
  dec.stop_reason = string_at(j, "stop_reason");
  for (const auto& gj : array_at(j, "groups")) {
    ProfileGroup g;
    for (const auto& a : array_at(gj, "anchors")) g.anchors.emplace(size_at(a, "n"), affine_of(a));
    for (const auto& m : array_at(gj, "members")) {
      g.members.push_back({small_int_at(m, "rank"), small_int_at(m, "i"), affine_of(at(m, "relative")),
                           real_at(m, "amplitude"), real_at(m, "spread")});
    }
    json fj;
    fj["dimension"] = dec.dim;
    fj["p"] = real(dec.p);
    fj["entries"] = array_at(gj, "profile");
    g.profile = field_of(fj);
    dec.groups.push_back(std::move(g));
  }
  for (const auto& sj : array_at(j, "steps")) {
    ExtractionStep s;
    s.rank = small_int_at(sj, "rank");
    s.gen = small_int_at(sj, "i");
    s.amplitude = real_at(sj, "amplitude");
    s.spread = real_at(sj, "spread");
    s.group = small_int_at(sj, "group");
    s.attach = string_at(sj, "attach");
    for (const auto& pj : array_at(sj, "picks"))
      s.picks.emplace(size_at(pj, "n"), RankedEntry{index_of(pj, dec.dim), real_at(pj, "amp")});
    dec.steps.push_back(std::move(s));
  }
  for (const auto& d : array_at(j, "diagnostics"))
    dec.diagnostics.push_back({string_at(d, "kind"), small_int_at(d, "rank"), string_at(d, "message")});
  return dec;
}

json table_json(const std::vector<std::vector<double>>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back(reals(r));
  return out;
}

std::vector<std::vector<double>> table_of(const json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& r : j) out.push_back(reals_of(r));
  return out;
}

json verification_json(const VerificationReport& v) {
  json j;
  j["positions"] = v.positions;
  j["tail"] = v.tail;
  json gaps = json::array();
  for (const auto& g : v.gaps) {
    gaps.push_back({{"l", g.l},
                    {"l2", g.l2},
                    {"values", reals(g.values)},
                    {"nondecreasing_tail", g.nondecreasing_tail},
                    {"strictly_increasing_tail", g.strictly_increasing_tail},
                    {"final_value", real(g.final_value)},
                    {"pass", g.pass}});
  }
  j["gaps"] = std::move(gaps);
  j["gaps_pass"] = v.gaps_pass;
  j["remainder_norms"] = table_json(v.remainder_norms);
  j["remainder_tail_max"] = reals(v.remainder_tail_max);
  j["remainder_nonincreasing"] = v.remainder_nonincreasing;
  j["stability"] = {{"per_position", reals(v.stability_per_position)},
                    {"profile_sum", real(v.stability_profile_sum)},
                    {"tail_min", real(v.stability_tail_min)},
                    {"tolerance", real(v.stability_tolerance)},
                    {"pass", v.stability_pass}};
  j["input_remainder_norms"] = table_json(v.input_remainder_norms);
  j["input_norms"] = reals(v.input_norms);
  j["remainder_margin"] = reals(v.remainder_margin);
  j["max_remainder_margin"] = real(v.max_remainder_margin);
  json cross = json::array();
  for (const auto& c : v.cross) cross.push_back({{"l", c.l}, {"l2", c.l2}, {"values", reals(c.values)}});
  j["cross"] = std::move(cross);
  j["amplitude_p_sum"] = real(v.amplitude_p_sum);
  j["amplitude_p_ratio"] = real(v.amplitude_p_ratio);
  j["reconstruction_exact"] = v.reconstruction_exact;
  j["lattice_ok"] = v.lattice_ok;
  return j;
}

VerificationReport verification_of(const json& j) {
  VerificationReport v;
  v.positions = sizes_of(at(j, "positions"));
  v.tail = sizes_of(at(j, "tail"));
  for (const auto& g : array_at(j, "gaps")) {
    GapTable t;
    t.l = size_at(g, "l");
    t.l2 = size_at(g, "l2");
    t.values = reals_of(at(g, "values"));
    t.nondecreasing_tail = bool_at(g, "nondecreasing_tail");
    t.strictly_increasing_tail = bool_at(g, "strictly_increasing_tail");
    t.final_value = real_at(g, "final_value");
    t.pass = bool_at(g, "pass");
    v.gaps.push_back(std::move(t));
  }
  v.gaps_pass = bool_at(j, "gaps_pass");
  v.remainder_norms = table_of(at(j, "remainder_norms"));
  v.remainder_tail_max = reals_of(at(j, "remainder_tail_max"));
  v.remainder_nonincreasing = bool_at(j, "remainder_nonincreasing");
  const auto& st = at(j, "stability");
  v.stability_per_position = reals_of(at(st, "per_position"));
  v.stability_profile_sum = real_at(st, "profile_sum");
  v.stability_tail_min = real_at(st, "tail_min");
  v.stability_tolerance = real_at(st, "tolerance");
  v.stability_pass = bool_at(st, "pass");
  v.input_remainder_norms = table_of(at(j, "input_remainder_norms"));
  v.input_norms = reals_of(at(j, "input_norms"));
  v.remainder_margin = reals_of(at(j, "remainder_margin"));
  v.max_remainder_margin = real_at(j, "max_remainder_margin");
  for (const auto& c : array_at(j, "cross")) {
    CrossTable t;
    t.l = size_at(c, "l");
    t.l2 = size_at(c, "l2");
    t.values = reals_of(at(c, "values"));
    v.cross.push_back(std::move(t));
  }
  v.amplitude_p_sum = real_at(j, "amplitude_p_sum");
  v.amplitude_p_ratio = real_at(j, "amplitude_p_ratio");
  v.reconstruction_exact = bool_at(j, "reconstruction_exact");
  v.lattice_ok = bool_at(j, "lattice_ok");
  return v;
}

template <class F>
auto parse(const std::string& text, F&& build) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return build(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("unexpected JSON content: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string field_to_json(const CoeffField& f) { return dump(field_json(f)); }
CoeffField field_from_json(const std::string& text) { return parse(text, field_of); }

std::string config_to_json(const ExtractConfig& cfg) { return dump(config_json(cfg)); }
ExtractConfig config_from_json(const std::string& text) { return parse(text, config_of); }

std::string spec_to_json(const SyntheticSpec& spec) { return dump(spec_json(spec)); }
SyntheticSpec spec_from_json(const std::string& text) { return parse(text, spec_of); }

std::string report_to_json(const ReportFile& report) {
  json j;
  j["format"] = "profdec-report";
  j["version"] = 1;
  j["config"] = config_json(report.config);
  j["decomposition"] = decomposition_json(report.decomposition);
  j["verification"] = report.verification ? verification_json(*report.verification) : json(nullptr);
  return dump(j);
}

ReportFile report_from_json(const std::string& text) {
  return parse(text, [](const json& j) {
    if (string_at(j, "format") != "profdec-report") throw ValidationError("not a profdec report");
    if (int_at(j, "version") != 1) throw ValidationError("unsupported report version");
    ReportFile r;
    r.config = config_of(at(j, "config"));
    r.decomposition = decomposition_of(at(j, "decomposition"));
    if (!at(j, "verification").is_null()) r.verification = verification_of(j["verification"]);
    return r;
  });
}

std::string norms_to_json(const NormReport& report) {
  json j;
  j["lp_tilde"] = real(report.lp_tilde);
  j["sup_tilde"] = real(report.sup_tilde);
  j["coeff_lp"] = real(report.coeff_lp);
  json besov = json::array();
  for (std::size_t i = 0; i < report.besov.size(); ++i) {
    const auto& prm = report.besov_params[i];
    besov.push_back({{"s", real(prm.s)}, {"a", real(prm.a)}, {"b", real(prm.b)}, {"value", real(report.besov[i])}});
  }
  j["besov"] = std::move(besov);
  return dump(j);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed for " + path.string());
}

std::string field_file_name(std::size_t n) {
  std::ostringstream os;
  os << "u_" << std::setw(4) << std::setfill('0') << n << ".json";
  return os.str();
}

std::vector<CoeffField> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
  std::size_t present = 0;
  static const std::regex pattern(R"(u_\d+\.json)");
  for (const auto& entry : fs::directory_iterator(dir))
    if (std::regex_match(entry.path().filename().string(), pattern)) ++present;
  std::vector<CoeffField> out;
  for (std::size_t n = 0;; ++n) {
    const auto path = dir / field_file_name(n);
    if (!fs::exists(path)) break;
    try {
      out.push_back(field_from_json(read_text(path)));
    } catch (const ValidationError& e) {
      throw ValidationError(path.filename().string() + ": " + e.what());
    }
  }
  if (out.empty()) throw ValidationError("no field files (u_0000.json, ...) in " + dir.string());
  if (out.size() != present) throw ValidationError("field files in " + dir.string() + " are not numbered contiguously");
  return out;
}

void save_corpus(const fs::path& dir, const std::vector<CoeffField>& fields) {
  fs::create_directories(dir);
  for (std::size_t n = 0; n < fields.size(); ++n) write_text(dir / field_file_name(n), field_to_json(fields[n]));
}

}  // namespace profdec::io
