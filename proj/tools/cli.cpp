// Copyright 2026 The mind Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mind/analytics.hpp"
#include "mind/annotation.hpp"
#include "mind/annotation_server.hpp"
#include "mind/catalog.hpp"
#include "mind/checkpoint.hpp"
#include "mind/error.hpp"
#include "mind/gateway.hpp"
#include "mind/jsonl.hpp"
#include "mind/kb.hpp"
#include "mind/pipeline.hpp"
#include "mind/prompt.hpp"
#include "mind/relation.hpp"
#include "mind/text.hpp"

namespace mind::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kMockTimestamp = "1970-01-01T00:00:00Z";

// --- settings ---------------------------------------------------------------

// Resolved configuration. Precedence: flags > environment > config file >
// defaults. `source` remembers where each value came from for --verbose.
struct Settings {
  std::string workdir = "mind-work";
  std::string model_url;
  std::string model_name;
  std::string prompt_dir;
  std::string relation_templates;
  int max_parallel = 4;
  int timeout_ms = 60000;
  int max_retries = 3;
  int min_request_interval_ms = 0;
  int workers = 4;
  int max_tokens = 256;
  double temperature = 0.2;
  std::map<std::string, std::string> source;

  fs::path catalog_dir() const { return fs::path(workdir) / "catalog"; }
  fs::path runs_dir() const { return fs::path(workdir) / "runs"; }
  fs::path kb_dir() const { return fs::path(workdir) / "kb"; }
  fs::path annotation_dir() const { return fs::path(workdir) / "annotation"; }
};

// Flag values as parsed; only those the user actually passed are applied.
struct Flags {
  std::string config;
  std::string workdir;
  std::string model_url;
  std::string model_name;
  std::string prompt_dir;
  std::string relation_templates;
  int max_parallel = 0;
  int timeout_ms = 0;
  int max_retries = 0;
  int min_request_interval_ms = 0;
  int workers = 0;
  int max_tokens = 0;
  double temperature = 0.0;
  bool verbose = false;
  bool dry_run = false;
};

template <typename T>
void take(Settings& s, const char* key, T& field, const T& value, const char* from) {
  field = value;
  s.source[key] = from;
}

void apply_config_file(Settings& s, const std::string& path) {
  const json j = json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorCode::kInvalidConfig, "config file " + path + " is not a JSON object");
  }
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "workdir") take(s, "workdir", s.workdir, v.get<std::string>(), "config");
      else if (key == "model_url") take(s, "model_url", s.model_url, v.get<std::string>(), "config");
      else if (key == "model_name") take(s, "model_name", s.model_name, v.get<std::string>(), "config");
      else if (key == "prompt_dir") take(s, "prompt_dir", s.prompt_dir, v.get<std::string>(), "config");
      else if (key == "relation_templates")
        take(s, "relation_templates", s.relation_templates, v.get<std::string>(), "config");
      else if (key == "max_parallel") take(s, "max_parallel", s.max_parallel, v.get<int>(), "config");
      else if (key == "timeout_ms") take(s, "timeout_ms", s.timeout_ms, v.get<int>(), "config");
      else if (key == "max_retries") take(s, "max_retries", s.max_retries, v.get<int>(), "config");
      else if (key == "min_request_interval_ms")
        take(s, "min_request_interval_ms", s.min_request_interval_ms, v.get<int>(), "config");
      else if (key == "workers") take(s, "workers", s.workers, v.get<int>(), "config");
      else if (key == "max_tokens") take(s, "max_tokens", s.max_tokens, v.get<int>(), "config");
      else if (key == "temperature") take(s, "temperature", s.temperature, v.get<double>(), "config");
      else if (key == "model_token" || key == "auth_token" || key == "token")
        fail(ErrorCode::kInvalidConfig,
             "config file must not hold credentials; set MIND_MODEL_TOKEN instead");
      else
        fail(ErrorCode::kInvalidConfig, "unknown config key \"" + key + "\"");
    } catch (const json::exception&) {
      fail(ErrorCode::kInvalidConfig, "config key \"" + key + "\" has the wrong type");
    }
  }
}

void apply_env(Settings& s) {
  auto env = [](const char* name) -> const char* {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? v : nullptr;
  };
  if (const char* v = env("MIND_WORKDIR")) take(s, "workdir", s.workdir, std::string(v), "env");
  if (const char* v = env("MIND_MODEL_URL")) take(s, "model_url", s.model_url, std::string(v), "env");
  if (const char* v = env("MIND_MODEL_NAME")) take(s, "model_name", s.model_name, std::string(v), "env");
  if (const char* v = env("MIND_PROMPT_DIR")) take(s, "prompt_dir", s.prompt_dir, std::string(v), "env");
  if (const char* v = env("MIND_RELATION_TEMPLATES")) {
    take(s, "relation_templates", s.relation_templates, std::string(v), "env");
  }
}

struct FlagRefs {
  CLI::Option* workdir = nullptr;
  CLI::Option* model_url = nullptr;
  CLI::Option* model_name = nullptr;
  CLI::Option* prompt_dir = nullptr;
  CLI::Option* relation_templates = nullptr;
  CLI::Option* max_parallel = nullptr;
  CLI::Option* timeout_ms = nullptr;
  CLI::Option* max_retries = nullptr;
  CLI::Option* min_interval = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* max_tokens = nullptr;
  CLI::Option* temperature = nullptr;
};

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

Settings resolve(const Flags& f, const FlagRefs& r) {
  Settings s;
  for (const char* k : {"workdir", "model_url", "model_name", "prompt_dir", "relation_templates",
                        "max_parallel", "timeout_ms", "max_retries", "min_request_interval_ms",
                        "workers", "max_tokens", "temperature"}) {
    s.source[k] = "default";
  }
  if (!f.config.empty()) apply_config_file(s, f.config);
  apply_env(s);
  if (given(r.workdir)) take(s, "workdir", s.workdir, f.workdir, "flag");
  if (given(r.model_url)) take(s, "model_url", s.model_url, f.model_url, "flag");
  if (given(r.model_name)) take(s, "model_name", s.model_name, f.model_name, "flag");
  if (given(r.prompt_dir)) take(s, "prompt_dir", s.prompt_dir, f.prompt_dir, "flag");
  if (given(r.relation_templates)) {
    take(s, "relation_templates", s.relation_templates, f.relation_templates, "flag");
  }
  if (given(r.max_parallel)) take(s, "max_parallel", s.max_parallel, f.max_parallel, "flag");
  if (given(r.timeout_ms)) take(s, "timeout_ms", s.timeout_ms, f.timeout_ms, "flag");
  if (given(r.max_retries)) take(s, "max_retries", s.max_retries, f.max_retries, "flag");
  if (given(r.min_interval)) {
    take(s, "min_request_interval_ms", s.min_request_interval_ms, f.min_request_interval_ms, "flag");
  }
  if (given(r.workers)) take(s, "workers", s.workers, f.workers, "flag");
  if (given(r.max_tokens)) take(s, "max_tokens", s.max_tokens, f.max_tokens, "flag");
  if (given(r.temperature)) take(s, "temperature", s.temperature, f.temperature, "flag");
  if (s.workers < 1) fail(ErrorCode::kInvalidConfig, "workers must be at least 1");
  return s;
}

void print_settings(const Settings& s, std::ostream& err) {
  json j;
  j["workdir"] = s.workdir;
  j["model_url"] = s.model_url;
  j["model_name"] = s.model_name;
  j["model_token"] = std::getenv("MIND_MODEL_TOKEN") != nullptr ? "(set)" : "(unset)";
  j["prompt_dir"] = s.prompt_dir;
  j["relation_templates"] = s.relation_templates;
  j["max_parallel"] = s.max_parallel;
  j["timeout_ms"] = s.timeout_ms;
  j["max_retries"] = s.max_retries;
  j["min_request_interval_ms"] = s.min_request_interval_ms;
  j["workers"] = s.workers;
  j["max_tokens"] = s.max_tokens;
  j["temperature"] = s.temperature;
  j["source"] = s.source;
  err << "settings " << j.dump() << "\n";
}

// --- helpers ----------------------------------------------------------------

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

PromptForge make_forge(const Settings& s, std::uint64_t seed) {
  PromptTemplates templates =
      s.prompt_dir.empty() ? PromptTemplates::defaults() : PromptTemplates::load_dir(s.prompt_dir);
  RelationTemplates relations = s.relation_templates.empty()
                                    ? RelationTemplates::defaults()
                                    : RelationTemplates::load(s.relation_templates);
  GenParams params;
  params.max_tokens = s.max_tokens;
  params.temperature = s.temperature;
  params.seed = seed;
  return PromptForge(std::move(templates), std::move(relations), params);
}

std::set<int> parse_stages(const std::string& spec) {
  std::set<int> stages;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const std::string t(text::trim(part));
    if (t == "1" || t == "2" || t == "3") {
      stages.insert(t[0] - '0');
    } else {
      fail(ErrorCode::kUsage, "stages must be a comma-separated subset of 1,2,3; got " + spec);
    }
  }
  if (stages.empty()) fail(ErrorCode::kUsage, "no stages selected");
  return stages;
}

json relation_stats_json(const std::vector<RelationStats>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back(json{{"relation", std::string(relation_name(r.relation))},
                       {"count", r.count},
                       {"rejected", r.rejected},
                       {"rfp_rate", opt(r.rfp_rate)}});
  }
  return arr;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  io::for_each_line(path, [&](std::string_view line, std::size_t) {
    lines.emplace_back(text::trim(line));
  });
  return lines;
}

// --- subcommands ------------------------------------------------------------

struct Context {
  Settings settings;
  bool verbose = false;
  bool dry_run = false;
  std::ostream& out;
  std::ostream& err;
};

struct IngestArgs {
  std::string products;
  std::string cobuys;
  bool skip_image_check = false;
  int probe_timeout_ms = 5000;
};

int cmd_ingest(Context& ctx, const IngestArgs& a) {
  Catalog catalog;
  catalog.ingest_products(a.products, !a.skip_image_check,
                          default_image_resolver(std::chrono::milliseconds(a.probe_timeout_ms)));
  const CatalogStats st = catalog.ingest_cobuys(a.cobuys);
  if (!ctx.dry_run) catalog.save(ctx.settings.catalog_dir());
  json j;
  j["products"] = catalog.products().size();
  j["products_dropped_no_image"] = st.products_dropped_no_image;
  j["cobuys"] = catalog.cobuys().size();
  j["cobuys_dropped"] = st.cobuys_dropped;
  j["catalog_dir"] = ctx.settings.catalog_dir().string();
  j["dry_run"] = ctx.dry_run;
  ctx.out << j.dump() << "\n";
  return 0;
}

struct RunArgs {
  std::string stages = "1,2,3";
  std::string relations = "all";
  std::uint32_t samples_per_pair = 1;
  std::string resume;
  std::string run_id;
  bool strict_prefix = false;
  std::string mock;
  std::uint64_t seed = 0;
  double abort_threshold = 0.2;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mock_opt = nullptr;
  CLI::Option* model_url_opt = nullptr;
};

int cmd_run(Context& ctx, const RunArgs& a) {
  const Settings& s = ctx.settings;
  const bool mock = given(a.mock_opt);
  if (mock && given(a.model_url_opt)) {
    fail(ErrorCode::kUsage, "--mock and --model-url are mutually exclusive");
  }
  if (mock && !given(a.seed_opt)) fail(ErrorCode::kUsage, "--mock requires --seed");

  std::unique_ptr<CompletionClient> client;
  if (mock) {
    auto scenario = parse_scenario(a.mock);
    if (!scenario) {
      fail(ErrorCode::kUsage, "unknown mock scenario " + a.mock +
                                  " (WellFormed, MissingPrefix, OverLongIntention, "
                                  "AmbiguousVerdict, AlwaysReject)");
    }
    client = std::make_unique<MockClient>(*scenario);
  } else {
    if (s.model_url.empty()) {
      fail(ErrorCode::kInvalidConfig,
           "no backend configured: set MIND_MODEL_URL (or --model-url) or pass --mock <scenario> --seed <n>");
    }
    BackendConfig bc = BackendConfig::from_env();
    bc.endpoint_url = s.model_url;
    bc.model_name = s.model_name;
    bc.max_parallel = s.max_parallel;
    bc.timeout_ms = s.timeout_ms;
    bc.max_retries = s.max_retries;
    bc.min_request_interval_ms = s.min_request_interval_ms;
    bc.validate();
    client = std::make_unique<HttpClient>(bc);
  }

  PipelineOptions options;
  options.relations = parse_relation_list(a.relations);
  options.samples_per_pair = a.samples_per_pair;
  options.parse.strict_prefix = a.strict_prefix;
  options.workers = s.workers;
  options.abort_threshold = a.abort_threshold;
  if (mock) options.clock = [] { return std::string(kMockTimestamp); };
  const std::set<int> stages = parse_stages(a.stages);

  const PromptForge forge = make_forge(s, a.seed);
  const std::string fingerprint =
      text::to_hex(text::fnv1a64(run_fingerprint(forge, options) + "\n" + client->backend_id()));

  std::string run_id = a.resume.empty() ? a.run_id : a.resume;
  bool resume = !a.resume.empty();
  if (run_id.empty()) {
    run_id = "run-" + fingerprint.substr(0, 12);
    resume = Checkpoint::exists(s.runs_dir(), run_id);
  }

  const Catalog catalog = Catalog::load(s.catalog_dir());
  if (ctx.dry_run) {
    json j;
    j["run_id"] = run_id;
    j["resume"] = resume;
    j["fingerprint"] = fingerprint;
    j["backend"] = client->backend_id();
    j["stages"] = stages;
    j["products"] = catalog.paired_product_ids().size();
    j["work_items"] = catalog.cobuys().size() * options.relations.size() * options.samples_per_pair;
    j["dry_run"] = true;
    ctx.out << j.dump() << "\n";
    return 0;
  }

  Checkpoint checkpoint = resume ? Checkpoint::resume(s.runs_dir(), run_id, fingerprint)
                                 : Checkpoint::create(s.runs_dir(), run_id, fingerprint);
  if (ctx.verbose) {
    ctx.err << (resume ? "resuming " : "starting ") << run_id << " on " << client->backend_id()
            << "\n";
  }
  IntentionKb kb = IntentionKb::open(s.kb_dir());
  Pipeline pipeline(catalog, *client, forge, checkpoint, options);
  const RunResult r = pipeline.run(stages, &kb);

  json j;
  j["run_id"] = run_id;
  j["fingerprint"] = fingerprint;
  j["backend"] = client->backend_id();
  if (r.features) {
    j["features"] = {{"annotated", r.features->annotated},
                     {"dead_lettered", r.features->dead_lettered},
                     {"dead_letter", r.features->dead_letter},
                     {"requests", r.features->requests}};
  }
  if (r.generation) {
    json by_class = json::object();
    for (const auto& [k, n] : r.generation->failures_by_class) {
      by_class[std::string(failure_class_name(k))] = n;
    }
    j["generation"] = {{"candidates", r.generation->candidates},
                       {"parse_failures", r.generation->parse_failures},
                       {"failures_by_class", by_class},
                       {"dead_lettered", r.generation->dead_lettered},
                       {"skipped_items", r.generation->skipped_items},
                       {"requests", r.generation->requests}};
  }
  if (r.filter) {
    j["filter"] = {{"candidates_in", r.filter->candidates_in},
                   {"accepted", r.filter->accepted},
                   {"rejected", r.filter->rejected},
                   {"unparseable", r.filter->unparseable},
                   {"dead_lettered", r.filter->dead_lettered},
                   {"requests", r.filter->requests}};
  }
  if (r.commit) {
    j["kb"] = {{"inserted_accepted", r.commit->inserted_accepted},
               {"inserted_rejected", r.commit->inserted_rejected},
               {"duplicates", r.commit->duplicates},
               {"failures_logged", r.commit->failures_logged}};
  }
  ctx.out << j.dump() << "\n";
  return 0;
}

struct ExportArgs {
  std::string format = "instruct";
  std::string out;
};

int cmd_export(Context& ctx, const ExportArgs& a) {
  if (a.format != "instruct") fail(ErrorCode::kUsage, "unsupported export format " + a.format);
  const IntentionKb kb = IntentionKb::open_read_only(ctx.settings.kb_dir());
  std::size_t lines = 0;
  if (ctx.dry_run) {
    lines = kb.stats().total;
    if (lines == 0) fail(ErrorCode::kEmptyExport, "knowledge base has no accepted intentions");
  } else {
    lines = kb.export_instruction_tuning(a.out);
  }
  ctx.out << json{{"lines", lines}, {"out", a.out}, {"dry_run", ctx.dry_run}}.dump() << "\n";
  return 0;
}

int cmd_stats(Context& ctx, bool as_json) {
  const IntentionKb kb = IntentionKb::open_read_only(ctx.settings.kb_dir());
  const KbStats st = kb.stats();
  if (as_json) {
    json j;
    j["total"] = st.total;
    j["rejected"] = st.rejected;
    j["failures"] = st.failures;
    j["rfp_rate"] = opt(st.rfp_rate);
    j["relations"] = relation_stats_json(st.relations);
    ctx.out << j.dump() << "\n";
    return 0;
  }
  ctx.out << std::left << std::setw(14) << "relation" << std::right << std::setw(10) << "accepted"
          << std::setw(10) << "rejected" << std::setw(8) << "rfp" << "\n";
  for (const auto& r : st.relations) {
    ctx.out << std::left << std::setw(14) << relation_name(r.relation) << std::right
            << std::setw(10) << r.count << std::setw(10) << r.rejected << std::setw(8);
    if (r.rfp_rate) {
      ctx.out << std::fixed << std::setprecision(3) << *r.rfp_rate;
    } else {
      ctx.out << "-";
    }
    ctx.out << "\n";
  }
  ctx.out << std::left << std::setw(14) << "total" << std::right << std::setw(10) << st.total
          << std::setw(10) << st.rejected << "\n";
  ctx.out << "failures " << st.failures << "\n";
  return 0;
}

struct QueryArgs {
  std::string relation;
  std::string contains;
  std::string product;
  bool accepted = false;
  bool rejected = false;
  std::size_t limit = 0;
};

int cmd_query(Context& ctx, const QueryArgs& a) {
  if (a.accepted && a.rejected) fail(ErrorCode::kUsage, "--accepted and --rejected are exclusive");
  KbQuery q;
  if (!a.relation.empty()) {
    q.relation = parse_relation(a.relation);
    if (!q.relation) fail(ErrorCode::kUsage, "unknown relation " + a.relation);
  }
  if (!a.contains.empty()) q.contains = a.contains;
  if (!a.product.empty()) q.product_id = a.product;
  if (a.accepted) q.accepted = true;
  if (a.rejected) q.accepted = false;
  const IntentionKb kb = IntentionKb::open_read_only(ctx.settings.kb_dir());
  std::size_t n = 0;
  for (const auto& r : kb.query(q)) {
    if (a.limit != 0 && n == a.limit) break;
    ctx.out << record_to_json_line(r) << "\n";
    ++n;
  }
  return 0;
}

struct AnalyzeArgs {
  std::size_t sample = 30000;
  std::uint64_t seed = 0;
  std::string taxonomy;
  std::size_t top_k = 25;
  std::string pairs;
  std::string embedder;
  int likert_base = 1;
};

int cmd_diversity(Context& ctx, const AnalyzeArgs& a) {
  if (a.taxonomy.empty()) fail(ErrorCode::kUsage, "--taxonomy is required");
  const Taxonomy taxonomy = Taxonomy::load(a.taxonomy);
  const IntentionKb kb = IntentionKb::open_read_only(ctx.settings.kb_dir());
  KbQuery q;
  q.accepted = true;
  const auto records = kb.query(q);
  std::vector<std::string> intentions;
  for (std::size_t i : text::sample_indices(records.size(), a.sample, a.seed)) {
    intentions.push_back(records[i].intention);
  }
  const LexiconNounExtractor extractor(taxonomy);
  json top = json::array();
  for (const auto& h : hypernym_distribution(intentions, taxonomy, extractor, a.top_k)) {
    top.push_back(json{{"hypernym", h.hypernym}, {"count", h.count}});
  }
  ctx.out << json{{"sampled", intentions.size()}, {"seed", a.seed}, {"top", top}}.dump() << "\n";
  return 0;
}

int cmd_robustness(Context& ctx, const AnalyzeArgs& a) {
  if (a.pairs.empty()) fail(ErrorCode::kUsage, "--pairs is required");
  std::vector<std::pair<std::string, std::string>> pairs;
  io::for_each_line(a.pairs, [&](std::string_view line, std::size_t n) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("original") || !j.contains("modified")) {
      fail(ErrorCode::kMalformed, a.pairs + " line " + std::to_string(n) +
                                      ": expected {\"original\",\"modified\"}");
    }
    pairs.emplace_back(j["original"].get<std::string>(), j["modified"].get<std::string>());
  });
  std::unique_ptr<Embedder> embedder;
  std::string kind = a.embedder;
  if (kind.empty()) kind = std::getenv("MIND_EMBED_URL") != nullptr ? "http" : "";
  if (kind == "hashed") {
    embedder = std::make_unique<HashedBowEmbedder>();
  } else if (kind == "http") {
    embedder = HttpEmbedder::from_env();
    if (!embedder) fail(ErrorCode::kInvalidConfig, "MIND_EMBED_URL is not set");
  } else {
    fail(ErrorCode::kInvalidConfig,
         "no embedder: set MIND_EMBED_URL or pass --embedder hashed");
  }
  const RobustnessReport r = robustness_report(pairs, *embedder);
  json j;
  j["embedder"] = kind;
  j["pairs"] = r.pairs;
  j["mean"] = r.mean;
  j["min"] = r.min;
  j["histogram"] = r.histogram;
  j["reference_mean"] = r.reference_mean;
  ctx.out << j.dump() << "\n";
  return 0;
}

int cmd_typicality(Context& ctx, const AnalyzeArgs& a) {
  LikertMapping mapping;
  mapping.base = a.likert_base;
  json rows = json::array();
  if (fs::exists(ctx.settings.annotation_dir() / "tasks.jsonl")) {
    const AnnotationStore store = AnnotationStore::open(ctx.settings.annotation_dir());
    for (const auto& t : typicality_report(store, mapping)) {
      rows.push_back(json{{"relation", std::string(relation_name(t.relation))},
                          {"items", t.items},
                          {"mean", t.mean}});
    }
  }
  ctx.out << json{{"relations", rows}, {"likert_base", mapping.base}}.dump() << "\n";
  return 0;
}

int cmd_rfp(Context& ctx) {
  const IntentionKb kb = IntentionKb::open_read_only(ctx.settings.kb_dir());
  const RfpReport r = rfp_by_relation(kb);
  ctx.out << json{{"overall", opt(r.overall)}, {"relations", relation_stats_json(r.relations)}}.dump()
          << "\n";
  return 0;
}

struct ServeArgs {
  std::string addr;
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  bool include_rejected = false;
  bool no_serve = false;
};

int cmd_annotate_serve(Context& ctx, const ServeArgs& a) {
  const std::string addr = a.addr.empty() ? default_listen_addr() : a.addr;
  const auto [host, port] = parse_listen_addr(addr);
  if (ctx.dry_run) {
    ctx.out << json{{"addr", host + ":" + std::to_string(port)},
                    {"create_tasks", a.sample},
                    {"dry_run", true}}.dump()
            << "\n";
    return 0;
  }
  AnnotationStore store = AnnotationStore::open(ctx.settings.annotation_dir());
  if (a.sample > 0) {
    const IntentionKb kb = IntentionKb::open_read_only(ctx.settings.kb_dir());
    KbQuery q;
    if (!a.include_rejected) q.accepted = true;
    const auto ids = store.create_tasks(a.sample, a.seed, kb.query(q));
    ctx.out << json{{"created_tasks", ids.size()}}.dump() << "\n";
  }
  if (a.no_serve) return 0;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  AnnotationServer server(store);
  const int bound = server.start(host, port);
  ctx.out << json{{"listening", host + ":" + std::to_string(bound)}}.dump() << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  return 0;
}

struct QualifyArgs {
  std::string answers;
  std::string key;
};

int cmd_qualify(Context& ctx, const QualifyArgs& a) {
  const QualificationResult r = qualification_score(read_lines(a.answers), read_lines(a.key));
  ctx.out << json{{"matches", r.matches},
                  {"total", r.total},
                  {"accuracy", r.accuracy},
                  {"passed", r.passed},
                  {"threshold_percent", kQualificationPercent}}.dump()
          << "\n";
  return 0;
}

void print_error(std::ostream& err, ErrorCode code, std::string_view message) {
  err << json{{"error", std::string(to_string(code))}, {"message", std::string(message)}}.dump()
      << "\n";
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"mind: distil purchase intentions from co-buy records with a vision-language model"};
  app.name("mind");
  app.require_subcommand(1, 1);
  app.fallthrough();

  Flags f;
  FlagRefs refs;
  app.add_option("--config", f.config, "JSON config file (flags > env > file > defaults)");
  refs.workdir = app.add_option("--workdir", f.workdir, "Work directory (env MIND_WORKDIR)");
  app.add_flag("--verbose,-v", f.verbose, "Print resolved settings and progress to stderr");
  app.add_flag("--dry-run", f.dry_run, "Validate and report without writing anything");

  // ingest
  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate and store the product catalog and co-buy records");
  ingest_cmd->add_option("--products", ingest.products, "Products JSONL")->required();
  ingest_cmd->add_option("--cobuys", ingest.cobuys, "Co-buy records JSONL {id,a,b}")->required();
  ingest_cmd->add_flag("--skip-image-check", ingest.skip_image_check,
                       "Keep image refs without probing them");
  ingest_cmd->add_option("--probe-timeout-ms", ingest.probe_timeout_ms, "Per-image probe timeout");

  // run
  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the feature, intention and filter stages");
  run_cmd->add_option("--stages", run.stages, "Comma-separated stages out of 1,2,3");
  run_cmd->add_option("--relations", run.relations, "\"all\" or a comma-separated relation list");
  run_cmd->add_option("--samples-per-pair", run.samples_per_pair,
                      "Intentions per pair and relation")->check(CLI::PositiveNumber);
  run_cmd->add_option("--resume", run.resume, "Resume an existing run id");
  run_cmd->add_option("--run-id", run.run_id, "Name a new run (default derives from the config)");
  run_cmd->add_flag("--strict-prefix", run.strict_prefix, "Exact relation prefix, no lead-in stripping");
  run.mock_opt = run_cmd->add_option("--mock", run.mock, "Deterministic mock backend scenario");
  run.seed_opt = run_cmd->add_option("--seed", run.seed, "Generation seed (required with --mock)");
  run_cmd->add_option("--abort-threshold", run.abort_threshold,
                      "Abort a stage when more than this fraction dead-letters")
      ->check(CLI::Range(0.0, 1.0));
  refs.model_url = run.model_url_opt =
      run_cmd->add_option("--model-url", f.model_url, "Chat-completions URL (env MIND_MODEL_URL)");
  refs.model_name = run_cmd->add_option("--model-name", f.model_name, "Model name (env MIND_MODEL_NAME)");
  refs.prompt_dir = run_cmd->add_option("--prompt-dir", f.prompt_dir,
                                        "feature.txt/intention.txt/filter.txt overrides (env MIND_PROMPT_DIR)");
  refs.relation_templates = run_cmd->add_option("--relation-templates", f.relation_templates,
                                                "Relation template TSV (env MIND_RELATION_TEMPLATES)");
  refs.max_parallel = run_cmd->add_option("--max-parallel", f.max_parallel, "Concurrent requests");
  refs.timeout_ms = run_cmd->add_option("--timeout-ms", f.timeout_ms, "Per-request timeout");
  refs.max_retries = run_cmd->add_option("--max-retries", f.max_retries, "Retries per request");
  refs.min_interval = run_cmd->add_option("--min-interval-ms", f.min_request_interval_ms,
                                          "Minimum spacing between request starts");
  refs.workers = run_cmd->add_option("--workers", f.workers, "Worker threads");
  refs.max_tokens = run_cmd->add_option("--max-tokens", f.max_tokens, "Completion token budget");
  refs.temperature = run_cmd->add_option("--temperature", f.temperature, "Sampling temperature");

  // export
  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "Export accepted intentions");
  export_cmd->add_option("--format", exp.format, "Export format")->check(CLI::IsMember({"instruct"}));
  export_cmd->add_option("--out", exp.out, "Output JSONL path")->required();

  // stats
  bool stats_json = false;
  auto* stats_cmd = app.add_subcommand("stats", "Per-relation knowledge base statistics");
  stats_cmd->add_flag("--json", stats_json, "Machine-readable output");

  // query
  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Print matching KB records as JSONL");
  query_cmd->add_option("--relation", query.relation, "Relation name");
  query_cmd->add_option("--contains", query.contains, "Case-insensitive intention substring");
  query_cmd->add_option("--product", query.product, "Product id on either side of the pair");
  query_cmd->add_flag("--accepted", query.accepted, "Accepted partition only");
  query_cmd->add_flag("--rejected", query.rejected, "Rejected partition only");
  query_cmd->add_option("--limit", query.limit, "Stop after this many records");

  // analyze
  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Diversity, robustness, typicality and RFP analyses");
  analyze_cmd->require_subcommand(1, 1);
  auto* div_cmd = analyze_cmd->add_subcommand("diversity", "Hypernym distribution of sampled intentions");
  div_cmd->add_option("--sample", an.sample, "Intentions to sample");
  div_cmd->add_option("--seed", an.seed, "Sampling seed");
  div_cmd->add_option("--taxonomy", an.taxonomy, "instance<TAB>hypernym<TAB>weight file")->required();
  div_cmd->add_option("--top-k", an.top_k, "Hypernyms to report")->check(CLI::PositiveNumber);
  auto* rob_cmd = analyze_cmd->add_subcommand("robustness", "Cosine similarity of reworded intentions");
  rob_cmd->add_option("--pairs", an.pairs, "JSONL of {original, modified}")->required();
  rob_cmd->add_option("--embedder", an.embedder, "http (MIND_EMBED_URL) or hashed")
      ->check(CLI::IsMember({"http", "hashed"}));
  auto* typ_cmd = analyze_cmd->add_subcommand("typicality", "Per-relation Likert typicality from annotations");
  typ_cmd->add_option("--likert-base", an.likert_base, "Score of an item with no positive votes");
  auto* rfp_cmd = analyze_cmd->add_subcommand("rfp", "Relation-wise filter preserve rate");

  // annotate-serve
  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("annotate-serve", "Serve the annotation REST API");
  serve_cmd->add_option("--addr", serve.addr, "host:port (env MIND_ANNOTATE_ADDR, default 127.0.0.1:8088)");
  serve_cmd->add_option("--sample", serve.sample, "Create this many tasks from the KB first");
  serve_cmd->add_option("--seed", serve.seed, "Task sampling seed");
  serve_cmd->add_flag("--include-rejected", serve.include_rejected, "Sample from both partitions");
  serve_cmd->add_flag("--no-serve", serve.no_serve, "Create tasks and exit");

  // qualify
  QualifyArgs qual;
  auto* qual_cmd = app.add_subcommand("qualify", "Score a rater's qualification answers");
  qual_cmd->add_option("--answers", qual.answers, "One answer per line")->required();
  qual_cmd->add_option("--key", qual.key, "Gold answers, one per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    print_error(err, ErrorCode::kUsage, e.what());
    return 2;
  }

  try {
    Context ctx{resolve(f, refs), f.verbose, f.dry_run, out, err};
    if (ctx.verbose) print_settings(ctx.settings, err);
    if (*ingest_cmd) return cmd_ingest(ctx, ingest);
    if (*run_cmd) return cmd_run(ctx, run);
    if (*export_cmd) return cmd_export(ctx, exp);
    if (*stats_cmd) return cmd_stats(ctx, stats_json);
    if (*query_cmd) return cmd_query(ctx, query);
    if (*analyze_cmd) {
      if (*div_cmd) return cmd_diversity(ctx, an);
      if (*rob_cmd) return cmd_robustness(ctx, an);
      if (*typ_cmd) return cmd_typicality(ctx, an);
      if (*rfp_cmd) return cmd_rfp(ctx);
    }
    if (*serve_cmd) return cmd_annotate_serve(ctx, serve);
    if (*qual_cmd) return cmd_qualify(ctx, qual);
    print_error(err, ErrorCode::kUsage, "no subcommand");
    return 2;
  } catch (const Error& e) {
    print_error(err, e.code(), e.what());
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    print_error(err, ErrorCode::kIo, e.what());
    return exit_code_for(ErrorCode::kIo);
  } catch (const std::exception& e) {
    print_error(err, ErrorCode::kMalformed, e.what());
    return exit_code_for(ErrorCode::kMalformed);
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("mind");
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mind::cli
