#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unemap/matrix.hpp"

namespace unemap {

// Quantitative variables recorded for every spell.
enum class Quant : std::size_t {
  AGE,      // years
  CMDUR,    // cumulated unemployment since first registration, months
  CPPAR,    // share of the unemployment period spent in occasional work
  DUR,      // latest spell length, days
  EXPER,    // job seniority, years
  INDUR,    // cumulated allowance duration, days
  MGAIN,    // monthly wage from occasional work
  MXMHEUR,  // monthly hours of occasional work
  NCHOM,    // number of unemployment spells
  TINDMOY,  // average daily benefit over the cumulated duration
  SRREVAL,  // daily wage in the latest job; absent for first-job seekers
};
inline constexpr std::size_t kQuantCount = 11;
inline constexpr std::size_t kFeatureCount = 10;

inline constexpr std::array<std::string_view, kQuantCount> kQuantNames = {
    "AGE", "CMDUR", "CPPAR", "DUR", "EXPER", "INDUR",
    "MGAIN", "MXMHEUR", "NCHOM", "TINDMOY", "SRREVAL"};

// Column order of the feature matrix. SRREVAL is descriptive only.
inline constexpr std::array<Quant, kFeatureCount> kFeatureOrder = {
    Quant::AGE, Quant::CMDUR, Quant::CPPAR, Quant::DUR, Quant::EXPER,
    Quant::INDUR, Quant::MGAIN, Quant::MXMHEUR, Quant::NCHOM, Quant::TINDMOY};

constexpr std::string_view name_of(Quant q) { return kQuantNames[static_cast<std::size_t>(q)]; }
// Accepts the alias PPAR for CPPAR.
std::optional<Quant> quant_from_name(std::string_view name);

// Qualitative variables, in the order used for indicator-matrix columns.
enum class Qual : std::size_t { AGEC, CTINDMOY, DIPL3, DURC, HAR, PPARC, RMOTIFA, RMOTIFI };
inline constexpr std::size_t kQualCount = 8;
inline constexpr std::array<std::string_view, kQualCount> kQualNames = {
    "AGEC", "CTINDMOY", "DIPL3", "DURC", "HAR", "PPARC", "RMOTIFA", "RMOTIFI"};

constexpr std::string_view name_of(Qual q) { return kQualNames[static_cast<std::size_t>(q)]; }
std::optional<Qual> qual_from_name(std::string_view name);

struct SpellRecord {
  std::string individual_id;
  int spell_index = 1;
  std::array<std::optional<double>, kQuantCount> quant{};
  int dipl3 = 0;    // 1 = above bac, 2 = bac, 3 = below bac
  int rmotifi = 0;  // registration cause 1..4
  std::optional<int> rmotifa;  // exit type 1..4; absent while the spell is ongoing

  std::optional<double> get(Quant q) const { return quant[static_cast<std::size_t>(q)]; }
  void set(Quant q, std::optional<double> v) { quant[static_cast<std::size_t>(q)] = v; }

  friend bool operator==(const SpellRecord&, const SpellRecord&) = default;
};

// Returns the reason a record violates the record invariants, if any.
std::optional<std::string> check_record(const SpellRecord& record);

// Maps canonical variable names to the header names found in an input file.
struct Schema {
  std::map<std::string, std::string> header_for;

  static Schema standard();
  // Lines of `CANONICAL = header`, '#' comments allowed. Unlisted variables
  // keep their canonical header.
  static Schema parse(std::string_view text);

  std::string header(std::string_view canonical) const;
};

struct Rejection {
  std::size_t line = 0;  // 1-based line in the source, header is line 1
  std::string reason;
};

struct IngestResult {
  std::vector<SpellRecord> records;
  std::vector<Rejection> rejections;

  std::size_t accepted() const { return records.size(); }
  std::size_t rejected() const { return rejections.size(); }
};

// Raw exit code 90 (administrative cancellation that hides unreported job
// finds) is folded into exit category 1.
IngestResult ingest(std::istream& in, const Schema& schema, char delimiter = ',');

// Canonical spell file: standard header, one row per record, empty field for
// absent optional values.
std::string serialize_spells(std::span<const SpellRecord> records, char delimiter = ',');

// Classification unit: the latest spell of each individual, in order of first
// appearance. Spells of one individual need not be contiguous in the input.
std::vector<SpellRecord> individual_records(std::span<const SpellRecord> spells);

// ---------------------------------------------------------------------------
// Qualitative coding

// Ordered bins over [0, inf). Bin i is [bounds[i-1], bounds[i]) with implicit
// 0 and +inf at the ends. With an exact-zero category, 0 gets its own bin that
// is matched before the intervals.
struct Binning {
  Quant source = Quant::AGE;
  std::vector<double> bounds;
  bool zero_category = false;
  std::vector<std::string> labels;

  static Binning make(Quant source, std::vector<double> bounds, bool zero_category);
  std::size_t bin_count() const { return labels.size(); }
};

struct CodingSpec {
  Binning agec;
  Binning ctindmoy;
  Binning durc;
  Binning har;
  Binning pparc;

  static CodingSpec standard();

  // Binning for a derived variable; throws DomainError for pass-through ones.
  const Binning& binning(Qual q) const;
  Binning& binning(Qual q);
  static bool is_derived(Qual q);

  std::vector<std::string> modality_labels(Qual q) const;
};

std::size_t discretize_index(Qual variable, double value, const CodingSpec& spec);
std::string discretize(Qual variable, double value, const CodingSpec& spec);

// ---------------------------------------------------------------------------
// Standardization (population standard deviation)

struct Standardized {
  std::vector<double> z;
  double mean = 0.0;
  double sd = 0.0;
};

Standardized standardize(std::span<const double> column);
std::vector<double> unstandardize(std::span<const double> z, double mean, double sd);

// ---------------------------------------------------------------------------

struct CodedDataset {
  std::vector<std::string> ids;
  Matrix features;  // n x kFeatureCount, standardized, columns in kFeatureOrder
  std::array<double, kFeatureCount> means{};
  std::array<double, kFeatureCount> sds{};
  // Per record modality index for each Qual, -1 when unknown (e.g. no exit yet).
  std::vector<std::array<int, kQualCount>> modalities;
  CodingSpec coding;

  std::size_t size() const { return ids.size(); }
};

CodedDataset build_feature_matrix(std::span<const SpellRecord> records, const CodingSpec& spec);

// Matrix file: header row of feature names then one row per record, values at
// 17 significant digits. Metadata file: sectioned key/value text carrying the
// column statistics, coding bins and per-record modality codes.
void write_coded(const CodedDataset& data, const std::filesystem::path& matrix_path,
                 const std::filesystem::path& meta_path);
CodedDataset read_coded(const std::filesystem::path& matrix_path,
                        const std::filesystem::path& meta_path);

}  // namespace unemap
