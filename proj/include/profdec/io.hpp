#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "profdec/extract.hpp"
#include "profdec/field.hpp"
#include "profdec/norms.hpp"
#include "profdec/synth.hpp"

namespace profdec::io {

// Text-level conversions. Every parser throws ValidationError on malformed
// input; writers produce deterministic output (sorted keys, shortest
// round-trip decimals, non-finite reals as the strings "inf", "-inf", "nan").

std::string field_to_json(const CoeffField& f);
CoeffField field_from_json(const std::string& text);

std::string config_to_json(const ExtractConfig& cfg);
ExtractConfig config_from_json(const std::string& text);

std::string spec_to_json(const SyntheticSpec& spec);
SyntheticSpec spec_from_json(const std::string& text);

/// A stored run: configuration echo, decomposition (without the sequence
/// fields, which live in the corpus directory) and optional verification.
struct ReportFile {
  ExtractConfig config;
  Decomposition decomposition;
  std::optional<VerificationReport> verification;

  friend bool operator==(const ReportFile&, const ReportFile&) = default;
};

std::string report_to_json(const ReportFile& report);
ReportFile report_from_json(const std::string& text);

std::string norms_to_json(const NormReport& report);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Corpus file name for sequence position n: u_0000.json, u_0001.json, ...
std::string field_file_name(std::size_t n);

/// Loads u_0000.json, u_0001.json, ... in order, stopping at the first gap.
/// Throws ValidationError if none are present or other u_*.json files are left over.
std::vector<CoeffField> load_corpus(const std::filesystem::path& dir);
void save_corpus(const std::filesystem::path& dir, const std::vector<CoeffField>& fields);

}  // namespace profdec::io
