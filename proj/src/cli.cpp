#include "profdec/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "profdec/errors.hpp"
#include "profdec/extract.hpp"
#include "profdec/io.hpp"
#include "profdec/norms.hpp"
#include "profdec/synth.hpp"

namespace profdec::cli {

namespace fs = std::filesystem;

namespace {

double parse_real(const std::string& text) {
  if (text == "inf") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ValidationError("not a number: '" + text + "'");
  return v;
}

BesovParams parse_besov(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(parse_real(item));
  if (parts.size() != 3) throw ValidationError("--besov expects s,a,b; got '" + text + "'");
  BesovParams prm{parts[0], parts[1], parts[2]};
  check_besov(prm);
  return prm;
}

struct GenerateArgs {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct DecomposeArgs {
  std::string in_dir;
  std::string config;
  std::string out;
  std::optional<int> tail_window;
  std::optional<double> stop_epsilon;
  std::optional<std::string> space;
  std::optional<std::string> p, a, q, r, b;
};

struct NormsArgs {
  std::string file;
  std::vector<std::string> besov;
};

struct VerifyArgs {
  std::string report;
  std::string in_dir;
  std::string out;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    io::write_text(path, text);
}

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
  auto spec = io::spec_from_json(io::read_text(args.spec));
  const bool random = spec.noise && spec.noise->epsilon > 0.0 && spec.noise->count > 0;
  if (random && !args.seed) throw ValidationError("--seed is required for specs with noise");
  if (args.seed) spec.seed = *args.seed;
  const auto syn = generate(spec);
  io::save_corpus(args.out, syn.sequence);

  io::ReportFile truth;
  truth.config.input.p = spec.p;
  truth.config.remainder = {2.0 * spec.p, 2.0 * spec.p};
  truth.decomposition = syn.truth;
  truth.decomposition.sequence.clear();
  io::write_text(fs::path(args.out) / "truth.json", io::report_to_json(truth));
  out << "wrote " << syn.sequence.size() << " field files and truth.json to " << args.out << "\n";
  return kOk;
}

ExtractConfig decompose_config(const DecomposeArgs& args, double field_p) {
  ExtractConfig cfg;
  if (!args.config.empty()) {
    cfg = io::config_from_json(io::read_text(args.config));
  } else {
    cfg.input.p = field_p;
    cfg.remainder = {std::max(8.0, 2.0 * field_p), std::max(8.0, 2.0 * field_p)};
  }
  if (args.tail_window) cfg.tail_window = *args.tail_window;
  if (args.stop_epsilon) cfg.stop_epsilon = *args.stop_epsilon;
  if (args.space) cfg.input.mode = *args.space == "besov" ? SpaceMode::besov : SpaceMode::lp;
  if (args.p) cfg.input.p = parse_real(*args.p);
  if (cfg.input.mode == SpaceMode::lp) {
    if (args.a || args.b) throw ValidationError("--a and --b only apply to --space besov");
    if (args.r) cfg.remainder.inner = parse_real(*args.r);
    if (args.q) cfg.remainder.outer = parse_real(*args.q);
  } else {
    if (args.a) cfg.input.a = parse_real(*args.a);
    if (args.q) cfg.input.q = parse_real(*args.q);
    if (args.b) cfg.remainder.inner = parse_real(*args.b);
    if (args.r) cfg.remainder.outer = parse_real(*args.r);
  }
  validate(cfg);
  return cfg;
}

void summarize(const io::ReportFile& rep, std::ostream& err) {
  const auto& dec = rep.decomposition;
  err << "groups: " << dec.groups.size() << ", retained positions: " << dec.retained.size() << " of "
      << dec.sequence_length << ", stop: " << dec.stop_reason << "\n";
  if (rep.verification) {
    const auto& v = *rep.verification;
    err << "gaps pass: " << (v.gaps_pass ? "yes" : "no") << ", stability pass: " << (v.stability_pass ? "yes" : "no")
        << ", exact reconstruction: " << (v.reconstruction_exact ? "yes" : "no") << "\n";
  }
  for (const auto& d : dec.diagnostics) err << "diagnostic [" << d.kind << "] rank " << d.rank << ": " << d.message << "\n";
}

int cmd_decompose(const DecomposeArgs& args, std::ostream& out, std::ostream& err) {
  const auto fields = io::load_corpus(args.in_dir);
  const auto cfg = decompose_config(args, fields.front().p());
  io::ReportFile rep;
  rep.config = cfg;
  rep.decomposition = extract_profiles(fields, cfg);
  rep.verification = verify(rep.decomposition, cfg);
  rep.decomposition.sequence.clear();
  emit(args.out, io::report_to_json(rep), out);
  summarize(rep, err);
  return kOk;
}

int cmd_norms(const NormsArgs& args, std::ostream& out) {
  const auto field = io::field_from_json(io::read_text(args.file));
  std::vector<BesovParams> besov;
  for (const auto& text : args.besov) besov.push_back(parse_besov(text));
  out << io::norms_to_json(norm_report(field, besov));
  return kOk;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  auto rep = io::report_from_json(io::read_text(args.report));
  auto& dec = rep.decomposition;
  auto fields = io::load_corpus(args.in_dir);
  if (fields.size() != dec.sequence_length)
    throw ValidationError("corpus has " + std::to_string(fields.size()) + " fields, report expects " +
                          std::to_string(dec.sequence_length));
  for (const auto& f : fields)
    if (f.dim() != dec.dim || f.p() != dec.p) throw ValidationError("corpus differs from the report in dimension or p");
  dec.sequence = std::move(fields);
  rep.verification = verify(dec, rep.config);
  dec.sequence.clear();
  emit(args.out, io::report_to_json(rep), out);
  summarize(rep, err);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Profile decomposition of sequences of wavelet coefficient fields", "profdec"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic corpus and its ground truth");
  generate_cmd->add_option("--config", gen.spec, "Synthetic spec JSON")->required()->check(CLI::ExistingFile);
  generate_cmd->add_option("--out", gen.out, "Output directory")->required();
  generate_cmd->add_option("--seed", gen.seed, "Noise seed (required when the spec has noise)");

  DecomposeArgs dcm;
  auto* decompose_cmd = app.add_subcommand("decompose", "Extract profiles from a corpus and verify them");
  decompose_cmd->add_option("in_dir", dcm.in_dir, "Corpus directory")->required();
  decompose_cmd->add_option("--config", dcm.config, "Extraction config JSON")->check(CLI::ExistingFile);
  decompose_cmd->add_option("--out", dcm.out, "Report path (stdout if omitted)");
  decompose_cmd->add_option("--tail-window", dcm.tail_window);
  decompose_cmd->add_option("--stop-epsilon", dcm.stop_epsilon);
  decompose_cmd->add_option("--space", dcm.space)->check(CLI::IsMember({"lp", "besov"}));
  decompose_cmd->add_option("--p", dcm.p, "Input exponent");
  decompose_cmd->add_option("--a", dcm.a, "Besov input inner exponent");
  decompose_cmd->add_option("--q", dcm.q, "lp: remainder outer exponent; besov: input outer exponent");
  decompose_cmd->add_option("--r", dcm.r, "lp: remainder inner exponent; besov: remainder outer exponent");
  decompose_cmd->add_option("--b", dcm.b, "Besov remainder inner exponent");

  NormsArgs nrm;
  auto* norms_cmd = app.add_subcommand("norms", "Print the norms of one field file as JSON");
  norms_cmd->add_option("file", nrm.file, "Field JSON")->required();
  norms_cmd->add_option("--besov", nrm.besov, "Besov parameters s,a,b (repeatable; 'inf' allowed)");

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "Recompute the verification section of a stored report");
  verify_cmd->add_option("report", ver.report, "Report JSON")->required();
  verify_cmd->add_option("in_dir", ver.in_dir, "Corpus directory")->required();
  verify_cmd->add_option("--out", ver.out, "Report path (stdout if omitted)");

  std::vector<std::string> storage{"profdec"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, out);
    if (*decompose_cmd) return cmd_decompose(dcm, out, err);
    if (*norms_cmd) return cmd_norms(nrm, out);
    if (*verify_cmd) return cmd_verify(ver, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::overflow_error& e) {
    err << "error: arithmetic range exceeded: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariant;
  }
  return kUsage;
}

}  // namespace profdec::cli
