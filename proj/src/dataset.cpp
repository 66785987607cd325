#include "unemap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "unemap/errors.hpp"
#include "unemap/text_io.hpp"

namespace unemap {

namespace {

constexpr std::array<std::string_view, 3> kDiplLabels = {">bac", "bac", "<bac"};
constexpr std::array<std::string_view, 4> kExitLabels = {"job", "training", "withdrawal",
                                                         "cancellation"};
constexpr std::array<std::string_view, 4> kRegistrationLabels = {"lay-off", "end-CDD", "quit",
                                                                 "first-job"};

// Raw exit code for administrative cancellations that are treated as job finds.
constexpr long long kUnreportedJobExitCode = 90;

std::string short_number(double v) { return text::format_double(v, 6); }

}  // namespace

std::optional<Quant> quant_from_name(std::string_view name) {
  if (name == "PPAR") return Quant::CPPAR;
  for (std::size_t i = 0; i < kQuantCount; ++i)
    if (kQuantNames[i] == name) return static_cast<Quant>(i);
  return std::nullopt;
}

std::optional<Qual> qual_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kQualCount; ++i)
    if (kQualNames[i] == name) return static_cast<Qual>(i);
  return std::nullopt;
}

std::optional<std::string> check_record(const SpellRecord& r) {
  if (r.spell_index < 1) return "spell_index below 1";
  if (const auto n = r.get(Quant::NCHOM); n && *n < 2) return "not recurring";
  for (const Quant q : {Quant::AGE, Quant::CMDUR, Quant::DUR, Quant::EXPER, Quant::INDUR,
                        Quant::MGAIN, Quant::MXMHEUR, Quant::TINDMOY, Quant::SRREVAL}) {
    if (const auto v = r.get(q); v && *v < 0) return std::string(name_of(q)) + " negative";
  }
  if (const auto p = r.get(Quant::CPPAR); p && (*p < 0 || *p > 1)) return "CPPAR outside [0,1]";
  if (r.dipl3 < 1 || r.dipl3 > 3) return "DIPL3 code " + std::to_string(r.dipl3) + " unknown";
  if (r.rmotifi < 1 || r.rmotifi > 4)
    return "RMOTIFI code " + std::to_string(r.rmotifi) + " unknown";
  if (r.rmotifa && (*r.rmotifa < 1 || *r.rmotifa > 4))
    return "RMOTIFA code " + std::to_string(*r.rmotifa) + " unknown";
  if (r.rmotifi == 4 && r.get(Quant::SRREVAL)) return "SRREVAL present for a first-job search";
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Schema Schema::standard() { return {}; }

Schema Schema::parse(std::string_view text) {
  Schema schema;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw SchemaError("schema line " + std::to_string(lineno) + ": expected NAME = header");
    const auto key = std::string(text::trim(body.substr(0, eq)));
    const auto value = std::string(text::trim(body.substr(eq + 1)));
    const bool known = key == "individual_id" || key == "spell_index" || key == "DIPL3" ||
                       key == "RMOTIFI" || key == "RMOTIFA" || quant_from_name(key).has_value();
    if (!known) throw SchemaError("schema line " + std::to_string(lineno) + ": unknown variable " + key);
    if (value.empty())
      throw SchemaError("schema line " + std::to_string(lineno) + ": empty header for " + key);
    schema.header_for[key == "PPAR" ? "CPPAR" : key] = value;
  }
  return schema;
}

std::string Schema::header(std::string_view canonical) const {
  if (const auto it = header_for.find(std::string(canonical)); it != header_for.end())
    return it->second;
  return std::string(canonical);
}

IngestResult ingest(std::istream& in, const Schema& schema, char delimiter) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("input has no header row");
  const auto header = text::split_fields(line, delimiter);
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t i = 0; i < header.size(); ++i)
    column_of.emplace(std::string(text::trim(header[i])), i);

  auto locate = [&](std::string_view canonical, bool mandatory) -> std::optional<std::size_t> {
    if (auto it = column_of.find(schema.header(canonical)); it != column_of.end()) return it->second;
    if (canonical == "CPPAR" && !schema.header_for.contains("CPPAR")) {
      if (auto it = column_of.find("PPAR"); it != column_of.end()) return it->second;
    }
    if (mandatory)
      throw SchemaError("missing mandatory column " + schema.header(canonical) + " (" +
                        std::string(canonical) + ")");
    return std::nullopt;
  };

  const auto id_col = *locate("individual_id", true);
  const auto spell_col = *locate("spell_index", true);
  std::array<std::optional<std::size_t>, kQuantCount> quant_col;
  for (std::size_t q = 0; q < kQuantCount; ++q)
    quant_col[q] = locate(kQuantNames[q], static_cast<Quant>(q) != Quant::SRREVAL);
  const auto dipl_col = *locate("DIPL3", true);
  const auto motifi_col = *locate("RMOTIFI", true);
  const auto motifa_col = locate("RMOTIFA", false);

  IngestResult result;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split_fields(line, delimiter);
    auto reject = [&](std::string reason) { result.rejections.push_back({lineno, std::move(reason)}); };
    if (fields.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, found " +
             std::to_string(fields.size()));
      continue;
    }

    SpellRecord r;
    r.individual_id = std::string(text::trim(fields[id_col]));
    if (r.individual_id.empty()) {
      reject("individual_id missing");
      continue;
    }
    std::optional<std::string> problem;
    auto integer_field = [&](std::size_t col, std::string_view name) -> std::optional<long long> {
      const auto raw = text::trim(fields[col]);
      if (raw.empty()) {
        problem = std::string(name) + " missing";
        return std::nullopt;
      }
      // Accept integral values written as decimals, e.g. "2.0".
      if (const auto v = text::parse_double(raw); v && std::floor(*v) == *v) return static_cast<long long>(*v);
      problem = std::string(name) + " not an integer: '" + std::string(raw) + "'";
      return std::nullopt;
    };

    if (const auto s = integer_field(spell_col, "spell_index")) r.spell_index = static_cast<int>(*s);
    for (std::size_t q = 0; q < kQuantCount && !problem; ++q) {
      if (!quant_col[q]) continue;
      const auto raw = text::trim(fields[*quant_col[q]]);
      if (raw.empty()) {
        if (static_cast<Quant>(q) != Quant::SRREVAL) problem = std::string(kQuantNames[q]) + " missing";
        continue;
      }
      const auto v = text::parse_double(raw);
      if (!v) {
        problem = std::string(kQuantNames[q]) + " not numeric: '" + std::string(raw) + "'";
        continue;
      }
      r.quant[q] = *v;
    }
    if (!problem)
      if (const auto d = integer_field(dipl_col, "DIPL3")) r.dipl3 = static_cast<int>(*d);
    if (!problem)
      if (const auto m = integer_field(motifi_col, "RMOTIFI")) r.rmotifi = static_cast<int>(*m);
    if (!problem && motifa_col && !text::trim(fields[*motifa_col]).empty()) {
      if (auto a = integer_field(*motifa_col, "RMOTIFA")) {
        if (*a == kUnreportedJobExitCode) *a = 1;
        r.rmotifa = static_cast<int>(*a);
      }
    }
    if (!problem) problem = check_record(r);
    if (problem) {
      reject(*problem);
      continue;
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

std::string serialize_spells(std::span<const SpellRecord> records, char delimiter) {
  std::vector<std::string> header = {"individual_id", "spell_index"};
  for (auto n : kQuantNames) header.emplace_back(n);
  header.insert(header.end(), {"DIPL3", "RMOTIFI", "RMOTIFA"});

  std::string out = text::join(header, delimiter) + "\n";
  std::vector<std::string> row;
  for (const auto& r : records) {
    row.clear();
    row.push_back(text::quote_field(r.individual_id, delimiter));
    row.push_back(std::to_string(r.spell_index));
    for (const auto& v : r.quant) row.push_back(v ? text::format_double(*v) : std::string{});
    row.push_back(std::to_string(r.dipl3));
    row.push_back(std::to_string(r.rmotifi));
    row.push_back(r.rmotifa ? std::to_string(*r.rmotifa) : std::string{});
    out += text::join(row, delimiter);
    out += '\n';
  }
  return out;
}

std::vector<SpellRecord> individual_records(std::span<const SpellRecord> spells) {
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<SpellRecord> out;
  for (const auto& s : spells) {
    auto [it, inserted] = slot.try_emplace(s.individual_id, out.size());
    if (inserted) {
      out.push_back(s);
    } else if (s.spell_index > out[it->second].spell_index) {
      out[it->second] = s;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Binning Binning::make(Quant source, std::vector<double> bounds, bool zero_category) {
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!std::isfinite(bounds[i]) || bounds[i] <= 0)
      throw DomainError("bin boundaries must be finite and positive");
    if (i && bounds[i] <= bounds[i - 1])
      throw DomainError("bin boundaries must be strictly increasing");
  }
  if (bounds.empty() && !zero_category) throw DomainError("binning needs at least two bins");

  Binning b;
  b.source = source;
  b.zero_category = zero_category;
  if (zero_category) {
    b.labels.push_back("0");
    if (bounds.empty()) {
      b.labels.push_back(">0");
    } else {
      b.labels.push_back("0-" + short_number(bounds.front()));
    }
  } else {
    b.labels.push_back("<" + short_number(bounds.front()));
  }
  for (std::size_t i = 1; i < bounds.size(); ++i)
    b.labels.push_back(short_number(bounds[i - 1]) + "-" + short_number(bounds[i]));
  if (!bounds.empty()) b.labels.push_back(">" + short_number(bounds.back()));
  b.bounds = std::move(bounds);
  return b;
}

CodingSpec CodingSpec::standard() {
  return {
      .agec = Binning::make(Quant::AGE, {25, 35, 45, 55}, false),
      .ctindmoy = Binning::make(Quant::TINDMOY, {60, 100, 150}, false),
      .durc = Binning::make(Quant::CMDUR, {12, 24}, false),
      .har = Binning::make(Quant::MXMHEUR, {39, 78, 117}, true),
      .pparc = Binning::make(Quant::CPPAR, {0.1, 0.3}, true),
  };
}

bool CodingSpec::is_derived(Qual q) {
  return q == Qual::AGEC || q == Qual::CTINDMOY || q == Qual::DURC || q == Qual::HAR ||
         q == Qual::PPARC;
}

const Binning& CodingSpec::binning(Qual q) const {
  switch (q) {
    case Qual::AGEC: return agec;
    case Qual::CTINDMOY: return ctindmoy;
    case Qual::DURC: return durc;
    case Qual::HAR: return har;
    case Qual::PPARC: return pparc;
    default: break;
  }
  throw DomainError(std::string(name_of(q)) + " is not a derived variable");
}

Binning& CodingSpec::binning(Qual q) {
  return const_cast<Binning&>(std::as_const(*this).binning(q));
}

std::vector<std::string> CodingSpec::modality_labels(Qual q) const {
  auto from = [](const auto& arr) { return std::vector<std::string>(arr.begin(), arr.end()); };
  switch (q) {
    case Qual::DIPL3: return from(kDiplLabels);
    case Qual::RMOTIFA: return from(kExitLabels);
    case Qual::RMOTIFI: return from(kRegistrationLabels);
    default: return binning(q).labels;
  }
}

std::size_t discretize_index(Qual variable, double value, const CodingSpec& spec) {
  const auto& b = spec.binning(variable);
  if (!std::isfinite(value) || value < 0)
    throw DomainError(std::string(name_of(variable)) + ": value " + text::format_double(value) +
                      " outside [0, inf)");
  if (b.zero_category && value == 0.0) return 0;
  const auto above = static_cast<std::size_t>(
      std::upper_bound(b.bounds.begin(), b.bounds.end(), value) - b.bounds.begin());
  return above + (b.zero_category ? 1 : 0);
}

std::string discretize(Qual variable, double value, const CodingSpec& spec) {
  return spec.binning(variable).labels[discretize_index(variable, value, spec)];
}

// ---------------------------------------------------------------------------

Standardized standardize(std::span<const double> column) {
  if (column.empty()) throw DomainError("cannot standardize an empty column");
  const auto n = static_cast<double>(column.size());
  double mean = 0.0;
  for (double v : column) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : column) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
    throw ZeroVarianceError("zero-variance column (all values " + text::format_double(mean, 6) + ")");
  Standardized out;
  out.mean = mean;
  out.sd = sd;
  out.z.reserve(column.size());
  for (double v : column) out.z.push_back((v - mean) / sd);
  return out;
}

std::vector<double> unstandardize(std::span<const double> z, double mean, double sd) {
  std::vector<double> out;
  out.reserve(z.size());
  for (double v : z) out.push_back(v * sd + mean);
  return out;
}

CodedDataset build_feature_matrix(std::span<const SpellRecord> records, const CodingSpec& spec) {
  const std::size_t n = records.size();
  CodedDataset data;
  data.coding = spec;
  data.features = Matrix(n, kFeatureCount);
  data.ids.reserve(n);
  data.modalities.reserve(n);

  std::vector<double> column(n);
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    const Quant q = kFeatureOrder[c];
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = records[i].get(q);
      if (!v)
        throw MissingValueError(std::string(name_of(q)) + " missing for individual " +
                                records[i].individual_id);
      column[i] = *v;
    }
    Standardized s;
    try {
      s = standardize(column);
    } catch (const ZeroVarianceError& e) {
      throw ZeroVarianceError(std::string(name_of(q)) + ": " + e.what());
    }
    data.means[c] = s.mean;
    data.sds[c] = s.sd;
    for (std::size_t i = 0; i < n; ++i) data.features(i, c) = s.z[i];
  }

  for (const auto& r : records) {
    data.ids.push_back(r.individual_id);
    std::array<int, kQualCount> m{};
    for (std::size_t k = 0; k < kQualCount; ++k) {
      const auto q = static_cast<Qual>(k);
      if (CodingSpec::is_derived(q)) {
        m[k] = static_cast<int>(discretize_index(q, *r.get(spec.binning(q).source), spec));
      }
    }
    m[static_cast<std::size_t>(Qual::DIPL3)] = r.dipl3 - 1;
    m[static_cast<std::size_t>(Qual::RMOTIFI)] = r.rmotifi - 1;
    m[static_cast<std::size_t>(Qual::RMOTIFA)] = r.rmotifa ? *r.rmotifa - 1 : -1;
    data.modalities.push_back(m);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Coded dataset files

namespace {

std::string bounds_text(const Binning& b) {
  std::string s = b.zero_category ? "zero:" : "";
  for (std::size_t i = 0; i < b.bounds.size(); ++i) {
    if (i) s += ',';
    s += text::format_double(b.bounds[i]);
  }
  return s;
}

Binning parse_bounds(Quant source, std::string_view s) {
  bool zero = false;
  if (s.starts_with("zero:")) {
    zero = true;
    s.remove_prefix(5);
  }
  std::vector<double> bounds;
  if (!text::trim(s).empty()) {
    for (const auto& f : text::split_fields(s, ',')) {
      const auto v = text::parse_double(f);
      if (!v) throw SchemaError("bad bin boundary '" + f + "'");
      bounds.push_back(*v);
    }
  }
  return Binning::make(source, std::move(bounds), zero);
}

}  // namespace

void write_coded(const CodedDataset& data, const std::filesystem::path& matrix_path,
                 const std::filesystem::path& meta_path) {
  std::string m;
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    if (c) m += ',';
    m += name_of(kFeatureOrder[c]);
  }
  m += '\n';
  for (std::size_t i = 0; i < data.features.rows(); ++i) {
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      if (c) m += ',';
      m += text::format_double(data.features(i, c));
    }
    m += '\n';
  }
  text::write_file(matrix_path, m);

  std::string meta = "# unemap coded dataset\n[dataset]\nversion = 1\n";
  meta += "n_records = " + std::to_string(data.size()) + "\n";
  meta += "\n[statistics]\n# column = mean sd (population)\n";
  for (std::size_t c = 0; c < kFeatureCount; ++c)
    meta += std::string(name_of(kFeatureOrder[c])) + " = " + text::format_double(data.means[c]) +
            " " + text::format_double(data.sds[c]) + "\n";
  meta += "\n[coding]\n";
  for (std::size_t k = 0; k < kQualCount; ++k) {
    const auto q = static_cast<Qual>(k);
    if (CodingSpec::is_derived(q))
      meta += std::string(name_of(q)) + " = " + bounds_text(data.coding.binning(q)) + "\n";
  }
  meta += "\n[modalities]\n";
  for (std::size_t k = 0; k < kQualCount; ++k) {
    const auto labels = data.coding.modality_labels(static_cast<Qual>(k));
    meta += std::string(kQualNames[k]) + " = " + text::join(labels, '|') + "\n";
  }
  meta += "\n[records]\n# individual_id then modality index per variable, -1 = unknown\nid";
  for (auto n : kQualNames) meta += "," + std::string(n);
  meta += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    meta += text::quote_field(data.ids[i], ',');
    for (int v : data.modalities[i]) meta += "," + std::to_string(v);
    meta += '\n';
  }
  text::write_file(meta_path, meta);
}

CodedDataset read_coded(const std::filesystem::path& matrix_path,
                        const std::filesystem::path& meta_path) {
  CodedDataset data;
  data.coding = CodingSpec::standard();

  std::istringstream meta(text::read_file(meta_path));
  std::string line, section;
  std::size_t n_records = 0;
  bool records_header_seen = false;
  while (std::getline(meta, line)) {
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (body.front() == '[') {
      section = std::string(body.substr(1, body.size() - 2));
      continue;
    }
    if (section == "records") {
      if (!records_header_seen) {
        records_header_seen = true;
        continue;
      }
      const auto f = text::split_fields(body, ',');
      if (f.size() != kQualCount + 1) throw SchemaError("bad record line in " + meta_path.string());
      data.ids.push_back(f[0]);
      std::array<int, kQualCount> m{};
      for (std::size_t k = 0; k < kQualCount; ++k) {
        const auto v = text::parse_int(f[k + 1]);
        if (!v) throw SchemaError("bad modality code in " + meta_path.string());
        m[k] = static_cast<int>(*v);
      }
      data.modalities.push_back(m);
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = std::string(text::trim(body.substr(0, eq)));
    const auto value = text::trim(body.substr(eq + 1));
    if (section == "dataset" && key == "n_records") {
      n_records = static_cast<std::size_t>(text::parse_int(value).value_or(0));
    } else if (section == "statistics") {
      const auto q = quant_from_name(key);
      const auto it = q ? std::find(kFeatureOrder.begin(), kFeatureOrder.end(), *q) : kFeatureOrder.end();
      if (it == kFeatureOrder.end()) throw SchemaError("unknown feature " + key);
      const auto parts = text::split_fields(value, ' ');
      if (parts.size() != 2) throw SchemaError("bad statistics line for " + key);
      const auto c = static_cast<std::size_t>(it - kFeatureOrder.begin());
      data.means[c] = text::parse_double(parts[0]).value_or(0.0);
      data.sds[c] = text::parse_double(parts[1]).value_or(0.0);
    } else if (section == "coding") {
      const auto q = qual_from_name(key);
      if (!q || !CodingSpec::is_derived(*q)) throw SchemaError("unknown coded variable " + key);
      data.coding.binning(*q) = parse_bounds(data.coding.binning(*q).source, value);
    }
  }
  if (data.ids.size() != n_records) throw SchemaError("record count mismatch in " + meta_path.string());

  std::istringstream mat(text::read_file(matrix_path));
  data.features = Matrix(n_records, kFeatureCount);
  std::getline(mat, line);  // header
  std::size_t r = 0;
  while (std::getline(mat, line)) {
    if (text::trim(line).empty()) continue;
    if (r >= n_records) throw SchemaError("matrix has more rows than metadata records");
    const auto f = text::split_fields(line, ',');
    if (f.size() != kFeatureCount) throw SchemaError("bad matrix row " + std::to_string(r + 2));
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      const auto v = text::parse_double(f[c]);
      if (!v) throw SchemaError("bad matrix value at row " + std::to_string(r + 2));
      data.features(r, c) = *v;
    }
    ++r;
  }
  if (r != n_records) throw SchemaError("matrix row count mismatch");
  return data;
}

}  // namespace unemap
