#include "unemap/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include <Eigen/Core>

#include "json.hpp"

#include "unemap/dataset.hpp"
#include "unemap/macrocluster.hpp"
#include "unemap/mca.hpp"
#include "unemap/plots.hpp"
#include "unemap/profiles.hpp"
#include "unemap/som.hpp"
#include "unemap/synthetic.hpp"
#include "unemap/text_io.hpp"
#include "unemap/transitions.hpp"

namespace unemap {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kSpells = "spells.csv";
constexpr const char* kRejections = "rejections.csv";
constexpr const char* kTruth = "truth.csv";
constexpr const char* kFeatures = "features.csv";
constexpr const char* kCodedMeta = "coded.ini";
constexpr const char* kSom = "som.txt";
constexpr const char* kTrace = "training_trace.csv";
constexpr const char* kAssignments = "assignments.csv";
constexpr const char* kQuality = "som_quality.csv";
constexpr const char* kPartition = "partition.csv";
constexpr const char* kDendrogram = "dendrogram.csv";
constexpr const char* kContiguity = "contiguity.csv";
constexpr const char* kRecordClasses = "record_classes.csv";
constexpr const char* kClassCounts = "class_counts.csv";
constexpr const char* kClassProfiles = "class_profiles.csv";
constexpr const char* kDistClass = "distributions_class.csv";
constexpr const char* kDistCell = "distributions_cell.csv";
constexpr const char* kNeighbor = "neighbor_distances.csv";
constexpr const char* kCodeProfiles = "codevector_profiles.csv";
constexpr const char* kMcaEigen = "mca_eigenvalues.csv";
constexpr const char* kMcaCoords = "mca_coordinates.csv";
constexpr const char* kMcaRows = "mca_individuals.csv";
constexpr const char* kMcaWarnings = "mca_warnings.txt";
constexpr const char* kManifest = "manifest.json";
constexpr const char* kTimings = "timings.json";

std::vector<std::string> feature_names() {
  std::vector<std::string> names;
  for (Quant q : kFeatureOrder) names.emplace_back(name_of(q));
  return names;
}

std::string source_stage(const PipelineConfig& c) { return c.input ? "ingest" : "synth"; }

class Context {
 public:
  Context(const PipelineConfig& config, std::ostream& log)
      : config_(config), log_(log), dir_(config.output_dir) {}

  const PipelineConfig& config() const { return config_; }
  std::ostream& log() { return log_; }
  fs::path path(std::string_view name) const { return dir_ / name; }

  void require(std::string_view name, const std::string& stage) const {
    if (!fs::exists(path(name))) throw MissingStageError(stage);
  }

  void write(std::string_view name, std::string_view contents) {
    text::write_file(path(name), contents);
    outputs_[std::string(name)] = sha256_hex(contents);
  }

  std::map<std::string, std::string> take_outputs() { return std::exchange(outputs_, {}); }

  std::vector<SpellRecord> spells() const {
    require(kSpells, source_stage(config_));
    std::ifstream in(path(kSpells));
    auto r = ingest(in, Schema::standard());
    if (!r.rejections.empty())
      throw Error(std::string(kSpells) + " line " + std::to_string(r.rejections.front().line) +
                  ": " + r.rejections.front().reason);
    return std::move(r.records);
  }

  CodedDataset coded() const {
    require(kFeatures, "code");
    require(kCodedMeta, "code");
    return read_coded(path(kFeatures), path(kCodedMeta));
  }

  SomMap map() const {
    require(kSom, "train");
    return parse_map(text::read_file(path(kSom)));
  }

 private:
  const PipelineConfig& config_;
  std::ostream& log_;
  fs::path dir_;
  std::map<std::string, std::string> outputs_;
};

std::vector<std::vector<std::string>> read_rows(const fs::path& path) {
  std::istringstream in(text::read_file(path));
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    rows.push_back(text::split_fields(line, ','));
  }
  return rows;
}

long long int_field(const std::string& s, const fs::path& from) {
  auto v = text::parse_int(s);
  if (!v) throw Error(from.filename().string() + ": bad integer '" + s + "'");
  return *v;
}

double num_field(const std::string& s, const fs::path& from) {
  auto v = text::parse_double(s);
  if (!v) throw Error(from.filename().string() + ": bad number '" + s + "'");
  return *v;
}

MacroPartition read_partition(const fs::path& path, std::size_t units) {
  MacroPartition p;
  p.label.assign(units, 0);
  int k = 0;
  for (const auto& row : read_rows(path)) {
    if (row.size() != 4) throw Error(path.filename().string() + ": expected 4 fields");
    const auto u = static_cast<std::size_t>(int_field(row[2], path));
    if (u >= units) throw Error(path.filename().string() + ": unit outside the grid");
    p.label[u] = static_cast<int>(int_field(row[3], path));
    k = std::max(k, p.label[u]);
  }
  p.k = static_cast<std::size_t>(k);
  p.members.resize(p.k);
  for (std::size_t u = 0; u < units; ++u) {
    if (p.label[u] < 1) throw Error(path.filename().string() + ": unit " + std::to_string(u) + " unlabeled");
    p.members[static_cast<std::size_t>(p.label[u] - 1)].push_back(u);
  }
  return p;
}

std::vector<QualDistribution> read_distributions(const fs::path& path, Qual variable) {
  std::vector<QualDistribution> out;
  for (const auto& row : read_rows(path)) {
    if (row.size() != 7) throw Error(path.filename().string() + ": expected 7 fields");
    if (row[2] != name_of(variable)) continue;
    const Scope scope = row[0] == "class" ? Scope::broad_class
                        : row[0] == "cell" ? Scope::grid_cell
                                           : Scope::population;
    const int id = static_cast<int>(int_field(row[1], path));
    if (out.empty() || out.back().scope != scope || out.back().scope_id != id) {
      QualDistribution d;
      d.scope = scope;
      d.scope_id = id;
      d.variable = variable;
      d.count = static_cast<std::size_t>(int_field(row[5], path));
      d.empty = row[6] == "1";
      out.push_back(std::move(d));
    }
    out.back().modalities.push_back(row[3]);
    out.back().frequency.push_back(num_field(row[4], path));
  }
  return out;
}

McaResult read_mca(const fs::path& coords, const fs::path& eigen) {
  McaResult r;
  for (const auto& row : read_rows(eigen)) {
    if (row.size() != 4) throw Error(eigen.filename().string() + ": expected 4 fields");
    r.eigenvalues.push_back(num_field(row[1], eigen));
    r.inertia_share.push_back(num_field(row[2], eigen));
  }
  const auto rows = read_rows(coords);
  if (rows.empty()) throw Error(coords.filename().string() + ": no modalities");
  r.axes = (rows.front().size() - 3) / 2;
  r.column_coordinates = Matrix(rows.size(), r.axes);
  std::map<std::string, std::size_t> var_index;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& row = rows[j];
    if (row.size() != 3 + 2 * r.axes) throw Error(coords.filename().string() + ": ragged row");
    auto [it, fresh] = var_index.emplace(row[0], r.variables.size());
    if (fresh) r.variables.push_back(row[0]);
    r.columns.push_back({it->second, row[1]});
    for (std::size_t k = 0; k < r.axes; ++k) r.column_coordinates(j, k) = num_field(row[2 + k], coords);
    r.masses.push_back(num_field(row[2 + r.axes], coords));
  }
  return r;
}

// ---------------------------------------------------------------------------
// stages

void stage_ingest(Context& ctx) {
  const auto& in_cfg = ctx.config().input;
  if (!in_cfg) throw ConfigError("input.path", "the ingest stage needs an [input] section");
  std::ifstream in(in_cfg->path);
  if (!in) throw ConfigError("input.path", "cannot open " + in_cfg->path.string());
  const Schema schema =
      in_cfg->schema ? Schema::parse(text::read_file(*in_cfg->schema)) : Schema::standard();
  auto result = ingest(in, schema, in_cfg->delimiter);
  ctx.log() << "ingest: " << result.accepted() << " spells accepted, " << result.rejected()
            << " rejected\n";
  ctx.write(kSpells, serialize_spells(result.records));
  std::string rej = "line,reason\n";
  for (const auto& r : result.rejections)
    rej += std::to_string(r.line) + "," + text::quote_field(r.reason, ',') + "\n";
  ctx.write(kRejections, rej);
}

void stage_synth(Context& ctx) {
  const auto& s = ctx.config().synthetic;
  if (!s) throw ConfigError("synthetic", "the synth stage needs a [synthetic] section");
  const auto seed = derive_seed(ctx.config().seed, "synth");
  auto cohort = generate_synthetic(reference_cohort_spec(s->n, seed));
  ctx.log() << "synth: " << cohort.individual_ids.size() << " individuals, " << cohort.spells.size()
            << " spells\n";
  ctx.write(kSpells, serialize_spells(cohort.spells));
  ctx.write(kTruth, serialize_truth(cohort));
}

void stage_code(Context& ctx) {
  const auto spells = ctx.spells();
  const auto people = individual_records(spells);
  auto data = build_feature_matrix(people, ctx.config().coding);
  ctx.log() << "code: " << data.size() << " individuals x " << kFeatureCount << " features\n";
  write_coded(data, ctx.path(kFeatures), ctx.path(kCodedMeta));
  ctx.write(kFeatures, text::read_file(ctx.path(kFeatures)));
  ctx.write(kCodedMeta, text::read_file(ctx.path(kCodedMeta)));
}

void stage_train(Context& ctx) {
  const auto data = ctx.coded();
  const auto& c = ctx.config();
  auto map = init_map(c.grid, kFeatureCount, data.features, c.init, derive_seed(c.seed, "train.init"));
  auto schedule = c.schedule;
  schedule.seed = derive_seed(c.seed, "train.schedule");
  map = train(std::move(map), data.features, schedule);

  const auto qe = quantization_error(map, data.features);
  const double te = topographic_error(map, data.features);
  ctx.log() << "train: quantization error " << text::format_fixed(qe, 4) << ", topographic error "
            << text::format_fixed(te, 4) << "\n";
  ctx.write(kSom, serialize_map(map));

  std::string trace = "epoch,radius,learning_rate,quantization_error,distortion\n";
  for (const auto& e : map.trace)
    trace += std::to_string(e.epoch) + "," + text::format_double(e.radius) + "," +
             text::format_double(e.learning_rate) + "," + text::format_double(e.quantization_error) +
             "," + text::format_double(e.distortion) + "\n";
  ctx.write(kTrace, trace);

  const auto a = assign(map, data.features);
  std::string out = "individual_id,unit,row,col\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    out += text::quote_field(data.ids[i], ',') + "," + std::to_string(a.unit[i]) + "," +
           std::to_string(map.topology.row_of(a.unit[i])) + "," +
           std::to_string(map.topology.col_of(a.unit[i])) + "\n";
  ctx.write(kAssignments, out);
  ctx.write(kQuality, "quantization_error,topographic_error\n" + text::format_double(qe) + "," +
                          text::format_double(te) + "\n");
}

struct Classified {
  CodedDataset data;
  SomMap map;
  Assignment assignment;
  MacroPartition partition;
  std::vector<int> record_class;
};

Classified classified(Context& ctx) {
  Classified c{ctx.coded(), ctx.map(), {}, {}, {}};
  ctx.require(kPartition, "cluster");
  c.assignment = assign(c.map, c.data.features);
  c.partition = read_partition(ctx.path(kPartition), c.map.units());
  for (auto u : c.assignment.unit) c.record_class.push_back(c.partition.label[u]);
  return c;
}

void stage_cluster(Context& ctx) {
  const auto data = ctx.coded();
  const auto map = ctx.map();
  const auto& c = ctx.config();
  const auto a = assign(map, data.features);

  std::vector<double> weights;
  if (c.occupancy_weights) {
    for (std::size_t u = 0; u < a.counts.size(); ++u) {
      if (a.counts[u] == 0)
        throw DomainError("occupancy weighting needs every unit occupied; unit " +
                          std::to_string(u) + " is empty");
      weights.push_back(static_cast<double>(a.counts[u]));
    }
  }
  auto result = ward(map.codebook, weights, c.k);
  canonicalize(result.partition, a.counts);
  const auto& p = result.partition;

  ctx.write(kPartition, export_partition(p, map.topology));
  ctx.write(kDendrogram, export_dendrogram(result.dendrogram));

  std::string cont = "broad_class,contiguous,components\n";
  for (const auto& r : contiguity_report(p, map.topology))
    cont += std::to_string(r.label) + "," + (r.contiguous ? "1" : "0") + "," +
            std::to_string(r.components) + "\n";
  ctx.write(kContiguity, cont);

  std::string rc = "individual_id,unit,broad_class\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    rc += text::quote_field(data.ids[i], ',') + "," + std::to_string(a.unit[i]) + "," +
          std::to_string(p.label[a.unit[i]]) + "\n";
  ctx.write(kRecordClasses, rc);

  std::string cc = "broad_class,units,records,share_pct\n";
  for (std::size_t k = 0; k < p.k; ++k)
    cc += std::to_string(k + 1) + "," + std::to_string(p.members[k].size()) + "," +
          std::to_string(p.record_counts[k]) + "," +
          text::format_fixed(100.0 * static_cast<double>(p.record_counts[k]) /
                                 static_cast<double>(data.size()), 2) + "\n";
  ctx.write(kClassCounts, cc);
  ctx.log() << "cluster: " << p.k << " broad classes over " << map.units() << " units\n";
}

void stage_profile(Context& ctx) {
  const auto spells = ctx.spells();
  auto c = classified(ctx);
  const auto people = individual_records(spells);
  if (people.size() != c.data.size())
    throw Error("coded data and spells disagree; rerun the code stage");
  for (std::size_t i = 0; i < people.size(); ++i)
    if (people[i].individual_id != c.data.ids[i])
      throw Error("coded data and spells disagree; rerun the code stage");

  const auto table = descriptive_values(people, rss_by_individual(spells));
  const auto profile = class_profiles(table.values, c.record_class, c.partition.k, table.variables);
  ctx.write(kClassProfiles, export_class_profiles(profile));

  std::vector<int> class_ids, cell_ids, units;
  for (std::size_t k = 1; k <= c.partition.k; ++k) class_ids.push_back(static_cast<int>(k));
  for (std::size_t u = 0; u < c.map.units(); ++u) cell_ids.push_back(static_cast<int>(u));
  for (auto u : c.assignment.unit) units.push_back(static_cast<int>(u));

  std::vector<QualDistribution> by_class, by_cell;
  for (std::size_t q = 0; q < kQualCount; ++q) {
    auto d = qualitative_distribution(c.data.modalities, c.record_class, class_ids,
                                      Scope::broad_class, static_cast<Qual>(q), c.data.coding);
    by_class.insert(by_class.end(), d.begin(), d.end());
    d = qualitative_distribution(c.data.modalities, units, cell_ids, Scope::grid_cell,
                                 static_cast<Qual>(q), c.data.coding);
    by_cell.insert(by_cell.end(), d.begin(), d.end());
  }
  ctx.write(kDistClass, export_distributions(by_class));
  ctx.write(kDistCell, export_distributions(by_cell));
  ctx.write(kNeighbor, export_neighbor_distances(neighbor_distances(c.map)));

  const auto names = feature_names();
  std::string cp = "unit,row,col,broad_class,variable,value\n";
  for (std::size_t u = 0; u < c.map.units(); ++u)
    for (const auto& [var, v] : codevector_profile(c.map, u, names))
      cp += std::to_string(u) + "," + std::to_string(c.map.topology.row_of(u)) + "," +
            std::to_string(c.map.topology.col_of(u)) + "," + std::to_string(c.partition.label[u]) +
            "," + var + "," + text::format_double(v) + "\n";
  ctx.write(kCodeProfiles, cp);
  ctx.log() << "profile: " << c.partition.k << " classes profiled\n";
}

void stage_transitions(Context& ctx) {
  const auto spells = ctx.spells();
  const auto& c = ctx.config();
  std::string sig = "direction,from,to,total_share\n";
  for (auto [dir, threshold] : {std::pair{Direction::registration_to_exit, c.threshold_registration_to_exit},
                                std::pair{Direction::exit_to_registration, c.threshold_exit_to_registration}}) {
    const auto table = build_table(extract_pairs(spells, dir), dir);
    const std::string stem = "transitions_" + std::string(name_of(dir));
    ctx.write(stem + ".csv", export_table(table));
    ctx.write(stem + "_counts.csv", export_counts(table));
    for (const auto& cell : significant_cells(table, threshold))
      sig += std::string(name_of(dir)) + "," + std::to_string(cell.from) + "," +
             std::to_string(cell.to) + "," + text::format_fixed(cell.share, 2) + "\n";
    ctx.log() << "transitions: " << name_of(dir) << " " << table.total << " pairs\n";
  }
  ctx.write("significant_cells.csv", sig);

  std::string rss = "individual_id,rss11,rss12,n_transitions\n";
  for (const auto& r : rss_by_individual(spells))
    rss += text::quote_field(r.individual_id, ',') + "," + text::format_double(r.rss11) + "," +
           text::format_double(r.rss12) + "," + std::to_string(r.n_transitions) + "\n";
  ctx.write("rss.csv", rss);
}

void stage_mca(Context& ctx) {
  const auto data = ctx.coded();
  const auto& c = ctx.config();
  const auto ind = indicator(categorical_table(data, c.mca_variables));
  const auto r = fit_mca(ind, c.mca_axes);
  std::string warn;
  for (const auto& w : r.warnings) {
    ctx.log() << "mca: warning: " << w << "\n";
    warn += w + "\n";
  }
  ctx.write(kMcaWarnings, warn);
  ctx.write(kMcaEigen, export_eigenvalues(r));
  ctx.write(kMcaCoords, export_modality_coordinates(r));
  std::string rows = "individual_id";
  for (std::size_t k = 1; k <= r.axes; ++k) rows += ",axis_" + std::to_string(k);
  rows += "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    rows += text::quote_field(data.ids[i], ',');
    for (std::size_t k = 0; k < r.axes; ++k) rows += "," + text::format_double(r.row_coordinates(i, k));
    rows += "\n";
  }
  ctx.write(kMcaRows, rows);
  ctx.log() << "mca: " << r.columns.size() << " modalities, " << r.eigenvalues.size()
            << " nontrivial axes\n";
}

void stage_plot(Context& ctx) {
  const auto map = ctx.map();
  ctx.require(kPartition, "cluster");
  ctx.require(kDistClass, "profile");
  ctx.require(kDistCell, "profile");
  ctx.require(kMcaCoords, "mca");
  ctx.require(kMcaEigen, "mca");
  if (!ctx.config().svg) {
    ctx.log() << "plot: svg output disabled\n";
    return;
  }
  const auto partition = read_partition(ctx.path(kPartition), map.units());
  const auto names = feature_names();
  ctx.write("fig_codevectors.svg", plots::codevector_grid(map, names));
  ctx.write("fig_class_profiles.svg", plots::class_profiles_panel(map, partition, names));
  ctx.write("fig_broad_classes.svg", plots::codevector_grid(map, names, &partition));
  ctx.write("fig_neighbor_distances.svg",
            plots::neighbor_distance_map(map, neighbor_distances(map), &partition));
  for (std::size_t q = 0; q < kQualCount; ++q) {
    const auto v = static_cast<Qual>(q);
    const std::string name(name_of(v));
    const auto classes = read_distributions(ctx.path(kDistClass), v);
    ctx.write("fig_dist_class_" + name + ".svg",
              plots::distribution_bars(classes, name + " by broad class"));
    const auto cells = read_distributions(ctx.path(kDistCell), v);
    ctx.write("fig_dist_cells_" + name + ".svg",
              plots::cell_distribution_grid(map.topology, cells, name + " over the grid"));
  }
  const auto mca = read_mca(ctx.path(kMcaCoords), ctx.path(kMcaEigen));
  for (const auto& [a, b] : ctx.config().mca_planes) {
    if (a > mca.axes || b > mca.axes)
      throw MissingStageError("mca");  // artifact predates the configured axes
    ctx.write("fig_mca_" + std::to_string(a) + "_" + std::to_string(b) + ".svg",
              plots::mca_plane(mca, a, b));
  }
  ctx.log() << "plot: figures written\n";
}

void dispatch(Stage s, Context& ctx) {
  switch (s) {
    case Stage::ingest: return stage_ingest(ctx);
    case Stage::synth: return stage_synth(ctx);
    case Stage::code: return stage_code(ctx);
    case Stage::train: return stage_train(ctx);
    case Stage::cluster: return stage_cluster(ctx);
    case Stage::profile: return stage_profile(ctx);
    case Stage::transitions: return stage_transitions(ctx);
    case Stage::mca: return stage_mca(ctx);
    case Stage::plot: return stage_plot(ctx);
    case Stage::all: break;
  }
}

json load_json(const fs::path& path) {
  if (!fs::exists(path)) return json::object();
  try {
    return json::parse(text::read_file(path));
  } catch (const json::exception&) {
    return json::object();
  }
}

std::string hex_seed(std::uint64_t v) {
  std::ostringstream o;
  o << std::hex << v;
  return o.str();
}

void record(Context& ctx, Stage s, std::map<std::string, std::string> outputs, double seconds) {
  const auto& c = ctx.config();
  json manifest = load_json(ctx.path(kManifest));
  manifest["tool"] = "unemap";
  manifest["versions"] = {{"unemap", std::string(kVersion)},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
  PipelineConfig hashed = c;  // the output location is not part of the analysis
  hashed.output_dir = ".";
  manifest["config_sha256"] = sha256_hex(hashed.canonical());
  manifest["seed"] = c.seed;
  json stage;
  stage["outputs"] = outputs;
  if (s == Stage::synth) stage["seed"] = hex_seed(derive_seed(c.seed, "synth"));
  if (s == Stage::train)
    stage["seed"] = {{"init", hex_seed(derive_seed(c.seed, "train.init"))},
                     {"schedule", hex_seed(derive_seed(c.seed, "train.schedule"))}};
  manifest["stages"][std::string(name_of(s))] = stage;
  text::write_file(ctx.path(kManifest), manifest.dump(2) + "\n");

  json timings = load_json(ctx.path(kTimings));
  timings[std::string(name_of(s))] = seconds;
  text::write_file(ctx.path(kTimings), timings.dump(2) + "\n");
}

}  // namespace

std::string_view name_of(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::synth: return "synth";
    case Stage::code: return "code";
    case Stage::train: return "train";
    case Stage::cluster: return "cluster";
    case Stage::profile: return "profile";
    case Stage::transitions: return "transitions";
    case Stage::mca: return "mca";
    case Stage::plot: return "plot";
    case Stage::all: return "all";
  }
  return "?";
}

std::optional<Stage> stage_from_name(std::string_view name) {
  for (Stage s : {Stage::ingest, Stage::synth, Stage::code, Stage::train, Stage::cluster,
                  Stage::profile, Stage::transitions, Stage::mca, Stage::plot, Stage::all})
    if (name_of(s) == name) return s;
  return std::nullopt;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t global, std::string_view label) {
  const std::string msg = "unemap-seed/" + std::string(label) + "/" + std::to_string(global);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(msg.data(), msg.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | digest[i];
  return v;
}

std::vector<Stage> expand(Stage stage, const PipelineConfig& config) {
  if (stage != Stage::all) return {stage};
  return {config.input ? Stage::ingest : Stage::synth,
          Stage::code,
          Stage::transitions,
          Stage::train,
          Stage::cluster,
          Stage::profile,
          Stage::mca,
          Stage::plot};
}

void run_stage(Stage stage, const PipelineConfig& config, std::ostream& log) {
  config.validate();
  fs::create_directories(config.output_dir);
  Context ctx(config, log);
  for (Stage s : expand(stage, config)) {
    const auto start = std::chrono::steady_clock::now();
    dispatch(s, ctx);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    record(ctx, s, ctx.take_outputs(), elapsed.count());
  }
}

int run_command(Stage stage, const PipelineConfig& config, std::ostream& log) {
  try {
    run_stage(stage, config, log);
    return 0;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  } catch (const MissingStageError& e) {
    log << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace unemap
