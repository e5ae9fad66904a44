//
// Copyright 2026 The nleguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string_view>

#include "CLI11.hpp"
#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "nleguard/attack.h"
#include "nleguard/dataset.h"
#include "nleguard/eval.h"
#include "nleguard/ground.h"
#include "nleguard/kb.h"
#include "nleguard/modelclient.h"
#include "nleguard/tagger.h"
#include "nleguard/text.h"
#include "spdlog/sinks/ostream_sink.h"
#include "spdlog/spdlog.h"

namespace nleguard::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kEffectiveConfigFile = "effective_config.json";
constexpr std::string_view kSnapshotFile = "kb.snapshot";
constexpr std::string_view kGroundedFile = "grounded.jsonl";
constexpr std::string_view kDefenseFile = "defense.json";
constexpr std::string_view kEvilFile = "evil.json";

// Reads --config files: a flat JSON object or key=value lines ('#' and ';'
// start comments). Keys may use '_' or '-'.
class FlatConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    std::vector<CLI::ConfigItem> items;
    std::string_view body = Trim(text);
    if (!body.empty() && body.front() == '{') {
      json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded() || !j.is_object()) {
        throw CLI::ConfigError("config file is not a valid JSON object");
      }
      for (const auto& [key, value] : j.items()) {
        std::string v;
        if (value.is_string()) {
          v = value.get<std::string>();
        } else if (value.is_number() || value.is_boolean()) {
          v = value.dump();
        } else {
          throw CLI::ConfigError("config key \"" + key + "\" must be a string, number or boolean");
        }
        items.push_back(Item(key, v));
      }
      return items;
    }
    int line_no = 0;
    for (std::string_view line : SplitOn(text, '\n')) {
      ++line_no;
      line = Trim(line);
      if (line.empty() || line.front() == '#' || line.front() == ';') continue;
      size_t eq = line.find('=');
      if (eq == std::string_view::npos || Trim(line.substr(0, eq)).empty()) {
        throw CLI::ConfigError("config line " + std::to_string(line_no) +
                               ": expected key=value");
      }
      std::string_view value = Trim(line.substr(eq + 1));
      if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
          value.back() == value.front()) {
        value = value.substr(1, value.size() - 2);
      }
      items.push_back(Item(Trim(line.substr(0, eq)), value));
    }
    return items;
  }

 private:
  static CLI::ConfigItem Item(std::string_view key, std::string_view value) {
    CLI::ConfigItem item;
    item.name = AsciiLower(key);
    std::replace(item.name.begin(), item.name.end(), '_', '-');
    item.inputs.emplace_back(value);
    return item;
  }
};

// Fills options left unset on the command line from `path`.
void ApplyConfigFile(CLI::App& sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::FileError::Missing(path);
  for (const CLI::ConfigItem& item : FlatConfig().from_config(in)) {
    CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config" || item.name == "help") {
      throw CLI::ConfigError("unknown config key \"" + item.name + "\" in " + path);
    }
    if (opt->count() > 0) continue;
    for (const std::string& v : item.inputs) opt->add_result(v);
    opt->run_callback();
  }
}

struct Flags {
  std::string kb;
  std::string blocklist;
  std::string dataset;
  std::string format = "canonical";
  std::string model_url = "mock";
  std::string reverse_url;
  std::string out;
  std::string templates;
  std::string tagger_lexicon;
  std::string mock_fixture;
  std::string dump;
  std::string base;
  std::string defended;
  std::string grounded;
  std::string annotations;
  size_t parallelism = 8;
  size_t max_candidates = 64;
  double max_error_rate = 0.01;
  double max_skip_rate = 0.01;
  std::optional<double> naturalness_multiplier;
  bool ground = false;
  uint64_t random_seed = 0;
  int timeout_ms = 10000;
  int retries = 3;
};

// A failed step: message for the user plus exit code.
struct Failure {
  int code;
  std::string message;
};

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInternal:
    case absl::StatusCode::kUnknown:
    case absl::StatusCode::kDataLoss:
      return kExitInternal;
    default:
      return kExitUser;
  }
}

Failure FromStatus(const absl::Status& status) {
  return {ExitCodeFor(status), std::string(status.message())};
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// Log lines go to the command's error stream.
void ConfigureLogging(std::ostream& err) {
  spdlog::drop("nleguard");
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, /*force_flush=*/true);
  sink->set_pattern("[%l] %v");
  auto logger = std::make_shared<spdlog::logger>("nleguard", std::move(sink));
  spdlog::set_default_logger(logger);
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("NLEGUARD_LOG"); env != nullptr && *env != '\0') {
    std::string name = AsciiLower(env);
    if (name == "error") {
      level = spdlog::level::err;
    } else if (name == "warn" || name == "warning") {
      level = spdlog::level::warn;
    } else if (name == "info") {
      level = spdlog::level::info;
    } else if (name == "debug") {
      level = spdlog::level::debug;
    } else {
      spdlog::warn("ignoring NLEGUARD_LOG={} (expected error|warn|info|debug)", env);
    }
  }
  spdlog::set_level(level);
}

std::optional<Failure> RequireFiles(
    std::initializer_list<std::pair<std::string_view, const std::string*>> paths) {
  for (const auto& [flag, path] : paths) {
    if (path->empty()) continue;
    std::error_code ec;
    if (!fs::is_regular_file(*path, ec)) {
      return Failure{kExitUser, absl::StrCat("--", ToAbsl(flag), ": no such file: ", *path)};
    }
  }
  return std::nullopt;
}

std::optional<Failure> RequireSet(std::string_view flag, const std::string& value) {
  if (!value.empty()) return std::nullopt;
  return Failure{kExitUser, absl::StrCat("--", ToAbsl(flag), " is required")};
}

absl::Status WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

absl::Status EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::FailedPreconditionError(
        absl::StrCat("cannot create output directory ", dir, ": ", ec.message()));
  }
  return absl::OkStatus();
}

// Every option of the subcommand with its effective value (flag, config file
// or default), keyed by long name.
json EffectiveConfig(const CLI::App& sub) {
  json j = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      std::vector<std::string> results = opt->results();
      if (opt->get_expected_min() == 0) {
        j[name] = true;
      } else if (results.size() == 1) {
        j[name] = results.front();
      } else {
        j[name] = results;
      }
    } else if (opt->get_expected_min() == 0) {
      j[name] = false;
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

absl::Status EchoConfig(const CLI::App& sub, const std::string& dir) {
  return WriteTextFile(fs::path(dir) / kEffectiveConfigFile,
                       EffectiveConfig(sub).dump(2) + "\n");
}

absl::StatusOr<KnowledgeBase> LoadKb(const Flags& flags) {
  IngestConfig config;
  if (!flags.blocklist.empty()) {
    if (absl::Status s = config.blocklist.AddFromFile(flags.blocklist); !s.ok()) return s;
  }
  if (flags.kb.empty()) {
    spdlog::warn("no --kb given; only negation candidates and no grounding are possible");
    return KnowledgeBase::Build({}, config);
  }
  IngestSummary summary;
  absl::StatusOr<KnowledgeBase> kb = LoadKnowledgeBase(flags.kb, config, &summary);
  if (kb.ok()) spdlog::info("knowledge base: {} triplets", kb->size());
  return kb;
}

absl::StatusOr<LoadResult> LoadInstances(const Flags& flags) {
  absl::StatusOr<LoadResult> data = LoadDataset(flags.dataset, flags.format);
  if (!data.ok()) return data.status();
  spdlog::info("dataset: {} instances, {} of {} rows skipped", data->instances.size(),
               data->skipped, data->rows);
  if (data->skipped > 0) {
    spdlog::warn("{} malformed dataset rows skipped", data->skipped);
  }
  if (absl::Status s = CheckSkipBudget(*data, flags.max_skip_rate); !s.ok()) return s;
  return data;
}

absl::StatusOr<LexiconTagger> LoadTagger(const Flags& flags) {
  if (flags.tagger_lexicon.empty()) return LexiconTagger::Default();
  return LexiconTagger::FromFile(flags.tagger_lexicon);
}

absl::StatusOr<TemplateTable> LoadTemplates(const Flags& flags) {
  if (flags.templates.empty()) return TemplateTable::Default();
  return TemplateTable::FromFile(flags.templates);
}

std::string ModelEndpoint(const Flags& flags, const std::string& url) {
  if (url == "mock" && !flags.mock_fixture.empty()) return "mock:" + flags.mock_fixture;
  return url;
}

void AddKbFlags(CLI::App* sub, Flags& f) {
  sub->add_option("--kb", f.kb, "Knowledge base snapshot or ConceptNet assertions dump");
  sub->add_option("--blocklist", f.blocklist,
                  "Extra blocked triplets (subject<TAB>relation<TAB>object)");
}

void AddDatasetFlags(CLI::App* sub, Flags& f) {
  sub->add_option("--dataset", f.dataset, "Dataset file");
  sub->add_option("--format", f.format, "Dataset format")
      ->check(CLI::IsMember({"esnli", "cose", "canonical"}))
      ->capture_default_str();
  sub->add_option("--max-skip-rate", f.max_skip_rate,
                  "Largest tolerated fraction of malformed dataset rows")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

// ---------------------------------------------------------------------------

std::optional<Failure> KbBuild(const CLI::App& sub, const Flags& flags, std::ostream& out) {
  if (auto f = RequireSet("dump", flags.dump)) return f;
  if (auto f = RequireSet("out", flags.out)) return f;
  if (auto f = RequireFiles({{"dump", &flags.dump}, {"blocklist", &flags.blocklist}})) {
    return f;
  }
  IngestConfig config;
  if (!flags.blocklist.empty()) {
    if (absl::Status s = config.blocklist.AddFromFile(flags.blocklist); !s.ok()) {
      return Failure{kExitUser, std::string(s.message())};
    }
  }
  IngestSummary summary;
  absl::StatusOr<KnowledgeBase> kb = Ingest(flags.dump, config, &summary);
  if (!kb.ok()) return Failure{kExitUser, std::string(kb.status().message())};
  if (absl::Status s = EnsureDir(flags.out); !s.ok()) return FromStatus(s);
  fs::path snapshot = fs::path(flags.out) / kSnapshotFile;
  if (absl::Status s = kb->SaveSnapshot(snapshot.string()); !s.ok()) return FromStatus(s);
  if (absl::Status s = EchoConfig(sub, flags.out); !s.ok()) return FromStatus(s);

  size_t skipped = summary.malformed + summary.non_english + summary.dropped_relation;
  out << "triplets: " << kb->size() << "\n"
      << "lines: " << summary.lines << "\n"
      << "skipped: " << skipped << " (malformed " << summary.malformed << ", non-English "
      << summary.non_english << ", relation " << summary.dropped_relation << ")\n"
      << "blocked: " << summary.blocked << "\n"
      << "snapshot: " << snapshot.string() << "\n";
  if (kb->empty()) spdlog::warn("knowledge base is empty after filtering");
  return std::nullopt;
}

std::optional<Failure> Attack(const CLI::App& sub, const Flags& flags, std::ostream& out) {
  if (auto f = RequireSet("dataset", flags.dataset)) return f;
  if (auto f = RequireSet("out", flags.out)) return f;
  if (auto f = RequireFiles({{"dataset", &flags.dataset},
                             {"kb", &flags.kb},
                             {"blocklist", &flags.blocklist},
                             {"templates", &flags.templates},
                             {"tagger-lexicon", &flags.tagger_lexicon},
                             {"mock-fixture", &flags.mock_fixture}})) {
    return f;
  }
  if (flags.parallelism == 0) return Failure{kExitUser, "--parallelism must be positive"};

  absl::StatusOr<LoadResult> data = LoadInstances(flags);
  if (!data.ok()) return FromStatus(data.status());
  if (data->instances.empty()) return Failure{kExitUser, "dataset has no usable instances"};
  absl::StatusOr<KnowledgeBase> kb = LoadKb(flags);
  if (!kb.ok()) return FromStatus(kb.status());
  absl::StatusOr<LexiconTagger> tagger = LoadTagger(flags);
  if (!tagger.ok()) return FromStatus(tagger.status());

  AttackConfig config;
  config.parallelism = flags.parallelism;
  config.candidates.max_candidates_per_nle = flags.max_candidates;
  config.max_error_rate = flags.max_error_rate;
  config.naturalness_multiplier = flags.naturalness_multiplier;

  // Knowledge-grounded models see the grounding appended to their context.
  auto suffixes = std::make_shared<absl::flat_hash_map<std::string, std::string>>();
  if (flags.ground) {
    absl::StatusOr<TemplateTable> templates = LoadTemplates(flags);
    if (!templates.ok()) return FromStatus(templates.status());
    for (const Instance& inst : data->instances) {
      absl::StatusOr<GroundedInstance> g =
          GroundInstance(inst, *kb, DefaultStopwords(), *templates);
      if (!g.ok()) return FromStatus(g.status());
      if (!g->knowledge.empty()) {
        (*suffixes)[inst.id] = absl::StrCat(ToAbsl(kContextMarker), g->knowledge);
      }
    }
    config.context_suffix = [suffixes](const Instance& inst) {
      auto it = suffixes->find(inst.id);
      return it == suffixes->end() ? std::string() : it->second;
    };
  }

  HttpClientOptions http;
  http.timeout = std::chrono::milliseconds(flags.timeout_ms);
  http.max_retries = flags.retries;
  std::string model_endpoint = ModelEndpoint(flags, flags.model_url);
  std::string reverse_endpoint =
      ModelEndpoint(flags, flags.reverse_url.empty() ? flags.model_url : flags.reverse_url);
  absl::StatusOr<std::unique_ptr<ModelClient>> model = MakeModelClient(model_endpoint, http);
  if (!model.ok()) return Failure{kExitUser, std::string(model.status().message())};
  absl::StatusOr<std::unique_ptr<ModelClient>> reverse =
      MakeModelClient(reverse_endpoint, http);
  if (!reverse.ok()) return Failure{kExitUser, std::string(reverse.status().message())};

  absl::StatusOr<AttackReport> report =
      RunAttack(data->instances, **model, **reverse, *kb, *tagger, config);
  if (!report.ok()) return FromStatus(report.status());
  if (absl::Status s = EnsureDir(flags.out); !s.ok()) return FromStatus(s);
  if (absl::Status s = WriteReport(*report, flags.out); !s.ok()) return FromStatus(s);
  if (absl::Status s = EchoConfig(sub, flags.out); !s.ok()) return FromStatus(s);

  out << "S_r: " << FormatDouble(report->s_r) << " (" << report->n_success << "/"
      << report->n_test << ")\n"
      << "H_r: " << FormatDouble(report->h_r) << " (" << report->n_inconsistent << "/"
      << report->n_proposed << ")\n";
  if (report->errors > 0) out << "errors: " << report->errors << "\n";
  return std::nullopt;
}

std::optional<Failure> Ground(const CLI::App& sub, const Flags& flags, std::ostream& out) {
  if (auto f = RequireSet("dataset", flags.dataset)) return f;
  if (auto f = RequireSet("out", flags.out)) return f;
  if (auto f = RequireFiles({{"dataset", &flags.dataset},
                             {"kb", &flags.kb},
                             {"blocklist", &flags.blocklist},
                             {"templates", &flags.templates}})) {
    return f;
  }
  absl::StatusOr<LoadResult> data = LoadInstances(flags);
  if (!data.ok()) return FromStatus(data.status());
  absl::StatusOr<KnowledgeBase> kb = LoadKb(flags);
  if (!kb.ok()) return FromStatus(kb.status());
  absl::StatusOr<TemplateTable> templates = LoadTemplates(flags);
  if (!templates.ok()) return FromStatus(templates.status());

  std::string lines;
  size_t with_knowledge = 0;
  for (const Instance& inst : data->instances) {
    absl::StatusOr<GroundedInstance> g =
        GroundInstance(inst, *kb, DefaultStopwords(), *templates);
    if (!g.ok()) return FromStatus(g.status());
    with_knowledge += g->selected.empty() ? 0 : 1;
    lines += ToJson(*g).dump();
    lines += '\n';
  }
  if (absl::Status s = EnsureDir(flags.out); !s.ok()) return FromStatus(s);
  if (absl::Status s = WriteTextFile(fs::path(flags.out) / kGroundedFile, lines); !s.ok()) {
    return FromStatus(s);
  }
  if (absl::Status s = EchoConfig(sub, flags.out); !s.ok()) return FromStatus(s);
  out << "grounded: " << data->instances.size() << " instances, " << with_knowledge
      << " with knowledge\n";
  return std::nullopt;
}

absl::StatusOr<std::set<TripletKey>> GroundingTriplets(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::set<TripletKey> keys;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      for (const json& t : j.at("selected_triplets")) {
        keys.emplace(t.at(0).get<std::string>(), t.at(1).get<std::string>(),
                     t.at(2).get<std::string>());
      }
    } catch (const json::exception& e) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": ", e.what()));
    }
  }
  return keys;
}

std::optional<Failure> Compare(const CLI::App& sub, const Flags& flags, std::ostream& out) {
  if (auto f = RequireSet("base", flags.base)) return f;
  if (auto f = RequireSet("defended", flags.defended)) return f;
  if (auto f = RequireFiles({{"grounded", &flags.grounded}})) return f;
  absl::StatusOr<AttackReport> base = ReadReport(flags.base);
  if (!base.ok()) return Failure{kExitUser, std::string(base.status().message())};
  absl::StatusOr<AttackReport> defended = ReadReport(flags.defended);
  if (!defended.ok()) return Failure{kExitUser, std::string(defended.status().message())};
  absl::StatusOr<DefenseReport> report = CompareRuns(*base, *defended);
  if (!report.ok()) return FromStatus(report.status());

  json j = ToJson(*report);
  std::optional<Overlap> overlap;
  if (!flags.grounded.empty()) {
    absl::StatusOr<std::set<TripletKey>> grounding = GroundingTriplets(flags.grounded);
    if (!grounding.ok()) return FromStatus(grounding.status());
    std::set<TripletKey> attack;
    for (const AttackRecord& r : defended->records) {
      if (r.triplet) attack.insert(KeyOf(*r.triplet));
    }
    overlap = KnowledgeOverlap(attack, *grounding);
    j["knowledge_overlap"] = {{"ratio", overlap->ratio},
                              {"defined", overlap->defined},
                              {"shared", overlap->shared},
                              {"grounding", overlap->grounding}};
  }
  if (!flags.out.empty()) {
    if (absl::Status s = EnsureDir(flags.out); !s.ok()) return FromStatus(s);
    if (absl::Status s = WriteTextFile(fs::path(flags.out) / kDefenseFile, j.dump(2) + "\n");
        !s.ok()) {
      return FromStatus(s);
    }
    if (absl::Status s = EchoConfig(sub, flags.out); !s.ok()) return FromStatus(s);
  }
  out << "defended: " << FormatDouble(report->defended_ratio) << " ("
      << report->defended_ids.size() << "/" << report->base_attacked.size() << ")\n"
      << "newly introduced: " << FormatDouble(report->newly_introduced_ratio) << " ("
      << report->newly_introduced_ids.size() << "/" << report->defended_attacked.size()
      << ")\n";
  if (overlap) {
    out << "knowledge overlap: " << FormatDouble(overlap->ratio) << " (" << overlap->shared
        << "/" << overlap->grounding << ")\n";
  }
  return std::nullopt;
}

std::optional<Failure> Evil(const CLI::App& sub, const Flags& flags, std::ostream& out) {
  if (auto f = RequireSet("annotations", flags.annotations)) return f;
  if (auto f = RequireFiles({{"annotations", &flags.annotations}})) return f;
  absl::StatusOr<std::vector<AnnotationRecord>> records = LoadAnnotations(flags.annotations);
  if (!records.ok()) return FromStatus(records.status());
  absl::StatusOr<double> score = EvilScore(*records);
  if (!score.ok()) return FromStatus(score.status());
  if (!flags.out.empty()) {
    if (absl::Status s = EnsureDir(flags.out); !s.ok()) return FromStatus(s);
    json j = {{"evil_score", *score}, {"instances", records->size()}};
    if (absl::Status s = WriteTextFile(fs::path(flags.out) / kEvilFile, j.dump(2) + "\n");
        !s.ok()) {
      return FromStatus(s);
    }
    if (absl::Status s = EchoConfig(sub, flags.out); !s.ok()) return FromStatus(s);
  }
  out << "e-ViL: " << FormatDouble(*score) << "\n";
  return std::nullopt;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ConfigureLogging(err);
  // The sink refers to `err`; detach it before returning.
  struct DetachLogger {
    ~DetachLogger() { spdlog::set_default_logger(std::make_shared<spdlog::logger>("nleguard")); }
  } detach;
  Flags flags;
  CLI::App app{"Attack natural-language explanations for inconsistency and ground them "
               "with commonsense knowledge.",
               "nleguard"};
  app.require_subcommand(1);

  std::map<const CLI::App*, std::string> config_files;
  auto add_command = [&](std::string name, std::string description) {
    CLI::App* sub = app.add_subcommand(std::move(name), std::move(description));
    sub->add_option("--config", config_files[sub],
                    "Config file (key=value lines or a JSON object); flags win");
    return sub;
  };

  CLI::App* kb_build = add_command("kb-build", "Ingest a ConceptNet dump into a snapshot");
  kb_build->add_option("--dump", flags.dump, "ConceptNet assertions CSV");
  kb_build->add_option("--blocklist", flags.blocklist,
                       "Extra blocked triplets (subject<TAB>relation<TAB>object)");
  kb_build->add_option("--out", flags.out, "Output directory");

  CLI::App* attack = add_command("attack", "Run the inconsistency attack");
  AddKbFlags(attack, flags);
  AddDatasetFlags(attack, flags);
  attack->add_option("--model-url", flags.model_url,
                     "Model endpoint: http://host:port, mock or mock:<fixture>")
      ->capture_default_str();
  attack->add_option("--reverse-url", flags.reverse_url,
                     "Reverse explainer endpoint (defaults to --model-url)");
  attack->add_option("--mock-fixture", flags.mock_fixture, "Fixture for mock endpoints");
  attack->add_option("--tagger-lexicon", flags.tagger_lexicon,
                     "Extra token<TAB>TAG entries for the tagger");
  attack->add_option("--templates", flags.templates,
                     "Extra relation<TAB>phrase templates (with --ground)");
  attack->add_flag("--ground", flags.ground,
                   "Append selected knowledge to the model context");
  attack->add_option("--out", flags.out, "Output directory");
  attack->add_option("--parallelism", flags.parallelism, "Concurrent instances")
      ->capture_default_str();
  attack->add_option("--max-candidates", flags.max_candidates,
                     "Candidate cap per explanation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  attack->add_option("--max-error-rate", flags.max_error_rate,
                     "Largest tolerated fraction of failed model calls")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  attack->add_option("--naturalness-multiplier", flags.naturalness_multiplier,
                     "Reported correction factor for inconsistency counts")
      ->check(CLI::Range(0.0, 1.0));
  attack->add_option("--timeout-ms", flags.timeout_ms, "HTTP request timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  attack->add_option("--retries", flags.retries, "HTTP retries for transient failures")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  attack->add_option("--random-seed", flags.random_seed, "Reserved; the pipeline is deterministic")
      ->capture_default_str();

  CLI::App* ground = add_command("ground", "Append selected knowledge to each instance");
  AddKbFlags(ground, flags);
  AddDatasetFlags(ground, flags);
  ground->add_option("--templates", flags.templates, "Extra relation<TAB>phrase templates");
  ground->add_option("--out", flags.out, "Output directory");

  CLI::App* compare = add_command("compare", "Compare a base and a defended attack report");
  compare->add_option("--base", flags.base, "Attack output directory of the base model");
  compare->add_option("--defended", flags.defended,
                      "Attack output directory of the defended model");
  compare->add_option("--grounded", flags.grounded,
                      "Grounded dataset, for the knowledge overlap ratio");
  compare->add_option("--out", flags.out, "Output directory");

  CLI::App* evil = add_command("evil", "Aggregate human annotations into an e-ViL score");
  evil->add_option("--annotations", flags.annotations, "Annotations JSONL");
  evil->add_option("--out", flags.out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    for (CLI::App* sub : app.get_subcommands()) ApplyConfigFile(*sub, config_files[sub]);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUser;
  }

  std::optional<Failure> failure;
  try {
    if (kb_build->parsed()) {
      failure = KbBuild(*kb_build, flags, out);
    } else if (attack->parsed()) {
      failure = Attack(*attack, flags, out);
    } else if (ground->parsed()) {
      failure = Ground(*ground, flags, out);
    } else if (compare->parsed()) {
      failure = Compare(*compare, flags, out);
    } else if (evil->parsed()) {
      failure = Evil(*evil, flags, out);
    }
  } catch (const std::exception& e) {
    failure = Failure{kExitInternal, absl::StrCat("internal error: ", e.what())};
  }
  if (failure) {
    err << "error: " << failure->message << "\n";
    return failure->code;
  }
  return kExitOk;
}

}  // namespace nleguard::cli
