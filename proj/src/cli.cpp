#include "dip/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "dip/alignment.hpp"
#include "dip/error.hpp"
#include "dip/metrics.hpp"
#include "dip/report.hpp"
#include "dip/simulator.hpp"
#include "dip/splitting.hpp"

namespace dip::cli {

namespace fs = std::filesystem;
using io::Json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  out.reserve(len * 2);
  static constexpr char hex[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::Io, path.string(), 0, "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string file_digest(const fs::path& path) { return sha256_hex(read_file(path)); }

void write_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::Io, path.string(), 0, "cannot write file");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw FormatError(FormatError::Kind::Io, path.string(), 0, "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw FormatError(FormatError::Kind::Io, path.string(), 0, "cannot move output into place");
  }
}

fs::path manifest_path(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

/// Collects what a run read so every output can carry a manifest.
class Run {
 public:
  Run(std::string command, std::vector<std::string> args, std::ostream& out, bool quiet)
      : command_(std::move(command)), args_(std::move(args)), out_(out), quiet_(quiet) {}

  std::string input(const fs::path& path) {
    std::string bytes = read_file(path);
    inputs_[path.string()] = sha256_hex(bytes);
    return bytes;
  }

  Json manifest(const Json& details) const {
    Json digests = Json::object();
    for (const auto& [path, digest] : inputs_) digests[path] = digest;
    Json m{{"command", command_},
           {"arguments", args_},
           {"inputs", std::move(digests)},
           {"tool_version", std::string(kToolVersion)},
           {"timestamp", utc_timestamp()}};
    if (!details.is_null()) m["details"] = details;
    return m;
  }

  /// JSON outputs embed their manifest under "manifest".
  void write_json(const fs::path& path, Json doc, const Json& details = nullptr) const {
    doc["manifest"] = manifest(details);
    write_atomic(path, doc.dump(2) + "\n");
  }

  /// Other outputs get "<path>.manifest.json" alongside.
  void write_with_manifest(const fs::path& path, const std::string& content, const Json& details = nullptr) const {
    write_atomic(path, content);
    Json m = manifest(details);
    m["output"] = {{"path", path.string()}, {"sha256", sha256_hex(content)}};
    write_atomic(manifest_path(path), m.dump(2) + "\n");
  }

  std::ostream& out() const { return out_; }
  bool quiet() const { return quiet_; }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::map<std::string, std::string> inputs_;
  std::ostream& out_;
  bool quiet_;
};

struct Globals {
  std::string labels_path;
  bool quiet = false;
};

LabelSet load_labels(Run& run, const Globals& g) {
  if (g.labels_path.empty()) return LabelSet::receipt_default();
  std::istringstream in(run.input(g.labels_path));
  return io::read_label_set(in, g.labels_path);
}

Corpus load_corpus(Run& run, const std::string& path, const LabelSet& labels) {
  std::istringstream in(run.input(path));
  return io::read_corpus(in, path, labels);
}

void require_valid(const Corpus& corpus, const std::string& source) {
  const auto violations = validate_corpus(corpus);
  if (violations.empty()) return;
  std::ostringstream os;
  os << source << ": " << violations.size() << " corpus violation(s); first: doc_id '" << violations.front().doc_id
     << "'";
  if (violations.front().token_index) os << " token " << *violations.front().token_index;
  os << ": " << violations.front().message;
  throw ValidationError(os.str());
}

// ---------------------------------------------------------------------------

struct AlignArgs {
  std::string ocr, fields, policy, out, audit;
};

int cmd_align(Run& run, const Globals& g, const AlignArgs& a) {
  const LabelSet labels = load_labels(run, g);
  const Corpus ocr = load_corpus(run, a.ocr, labels);
  require_valid(ocr, a.ocr);
  std::istringstream fields_in(run.input(a.fields));
  const auto table = io::read_fields(fields_in, a.fields);
  MatchPolicy policy;
  if (!a.policy.empty()) {
    std::istringstream policy_in(run.input(a.policy));
    policy = io::read_policy(policy_in, a.policy);
  }

  Corpus annotated;
  annotated.label_set = labels;
  std::ostringstream audit;
  for (const auto& doc : ocr.documents) {
    const auto it = table.find(doc.doc_id);
    if (it == table.end()) {
      audit << Json{{"doc_id", doc.doc_id}, {"reason", "no fields record"}, {"class", nullptr}, {"kind", "omitted"}}.dump()
            << '\n';
      continue;
    }
    for (const auto& f : it->second) {
      if (!labels.contains(f.class_name)) {
        throw ValidationError("doc_id '" + doc.doc_id + "': field class '" + f.class_name + "' is not in the label set");
      }
    }
    std::vector<FieldMatch> matches;
    const auto result = annotate_document(doc, it->second, policy, &matches);
    if (const auto* om = std::get_if<Omitted>(&result)) {
      audit << Json{{"doc_id", doc.doc_id}, {"reason", om->reason}, {"class", om->class_name}, {"kind", "omitted"}}
                   .dump()
            << '\n';
      continue;
    }
    for (const auto& m : matches) {
      if (m.result.ties == 0) continue;
      audit << Json{{"doc_id", doc.doc_id},
                    {"reason", std::to_string(m.result.ties) + " other window(s) ranked equal; earliest chosen"},
                    {"class", m.class_name},
                    {"kind", "tie"}}
                   .dump()
            << '\n';
    }
    annotated.documents.push_back(std::get<Document>(result));
  }

  const std::size_t total = ocr.documents.size();
  const std::size_t kept = annotated.documents.size();
  const double yield = total == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(total);
  const Json details{{"documents", total}, {"annotated", kept}, {"omitted", total - kept}, {"yield", yield}};

  std::ostringstream corpus_out;
  io::write_corpus(corpus_out, annotated);
  run.write_with_manifest(a.out, corpus_out.str(), details);
  run.write_with_manifest(a.audit, audit.str(), details);
  if (!run.quiet()) {
    run.out() << "aligned " << kept << "/" << total << " documents (yield " << report::fixed3(yield) << ")\n";
  }
  return 0;
}

struct SplitArgs {
  std::string corpus, scenario = "s1", out_train, out_test;
  double train_frac = 0.8;
  std::uint64_t seed = 0;
};

int cmd_split(Run& run, const Globals& g, const SplitArgs& a) {
  const LabelSet labels = load_labels(run, g);
  const Corpus corpus = load_corpus(run, a.corpus, labels);
  require_valid(corpus, a.corpus);
  const SplitSpec spec{parse_scenario(a.scenario), a.train_frac, a.seed};
  const SplitResult r = split(corpus, spec);

  std::map<std::string_view, const Document*> by_id;
  for (const auto& d : corpus.documents) by_id[d.doc_id] = &d;
  const auto dump = [&](const std::vector<std::string>& ids) {
    std::ostringstream os;
    for (const auto& id : ids) os << io::document_to_json(*by_id.at(id)).dump() << '\n';
    return os.str();
  };
  const Json details{{"scenario", std::string(to_string(spec.scenario))},
                     {"train_fraction", spec.train_fraction},
                     {"seed", spec.seed},
                     {"train_documents", r.train_ids.size()},
                     {"test_documents", r.test_ids.size()},
                     {"achieved_fraction", r.achieved_fraction()},
                     {"train_creditors", r.train_creditors},
                     {"test_creditors", r.test_creditors},
                     {"shared_creditors", r.shared_creditors}};
  run.write_with_manifest(a.out_train, dump(r.train_ids), details);
  run.write_with_manifest(a.out_test, dump(r.test_ids), details);
  if (!run.quiet()) {
    run.out() << "split " << to_string(spec.scenario) << ": train " << r.train_ids.size() << " docs / "
              << r.train_creditors << " creditors, test " << r.test_ids.size() << " docs / " << r.test_creditors
              << " creditors, achieved fraction " << report::fixed3(r.achieved_fraction()) << '\n';
  }
  return 0;
}

struct EvaluateArgs {
  std::string corpus, preds, scope = "non-none", out, name;
  std::size_t failures = 0;
};

int cmd_evaluate(Run& run, const Globals& g, const EvaluateArgs& a) {
  const LabelSet labels = load_labels(run, g);
  const Corpus corpus = load_corpus(run, a.corpus, labels);
  require_valid(corpus, a.corpus);
  std::istringstream preds_in(run.input(a.preds));
  const PredictionSet preds = io::read_predictions(preds_in, a.preds);
  const DipScope scope = parse_dip_scope(a.scope);
  const EvaluationReport rep = evaluate(corpus, preds, scope);
  const std::string name = a.name.empty() ? fs::path(a.preds).stem().string() : a.name;

  if (!a.out.empty()) {
    const std::string ext = lower_extension(a.out);
    const Json details{{"scope", std::string(to_string(scope))}};
    if (ext == ".json") {
      run.write_json(a.out, report::to_json(rep, name), details);
    } else if (ext == ".csv") {
      run.write_with_manifest(a.out, report::render_csv(rep), details);
    } else {
      throw ValidationError("--out must end in .json or .csv");
    }
  }
  if (!run.quiet()) {
    run.out() << report::render_table(rep);
    if (a.failures > 0) {
      run.out() << "\nfailure extracts (up to " << a.failures << " per class):\n"
                << report::render_failures(failure_extracts(corpus, preds, scope, a.failures));
    }
  }
  return 0;
}

struct SimulateArgs {
  std::string spec, noise, out_corpus, out_preds;
};

int cmd_simulate(Run& run, const Globals& g, const SimulateArgs& a) {
  const LabelSet labels = load_labels(run, g);
  CorpusSpec spec;
  spec.label_set = labels;
  if (!a.spec.empty()) {
    std::istringstream in(run.input(a.spec));
    spec = io::read_corpus_spec(in, a.spec, labels);
  }
  NoiseSpec noise;
  if (!a.noise.empty()) {
    std::istringstream in(run.input(a.noise));
    noise = io::read_noise_spec(in, a.noise);
  }
  const Corpus corpus = generate_corpus(spec);
  const PredictionSet preds = perturb(corpus, noise);
  const double measured = dip(corpus, preds).value();
  const double expected = expected_dip(noise.per_class_error_rate, spec.labeled_tokens_per_doc);

  const Json details{{"corpus_spec", io::corpus_spec_to_json(spec)},
                     {"noise_spec", io::noise_spec_to_json(noise)},
                     {"dip", measured},
                     {"expected_dip", expected}};
  std::ostringstream corpus_out;
  io::write_corpus(corpus_out, corpus);
  std::ostringstream preds_out;
  io::write_predictions(preds_out, corpus, preds);
  run.write_with_manifest(a.out_corpus, corpus_out.str(), details);
  run.write_with_manifest(a.out_preds, preds_out.str(), details);
  if (!run.quiet()) {
    run.out() << "simulated " << corpus.documents.size() << " documents: DIP " << report::fixed3(measured)
              << ", expected " << report::fixed3(expected) << '\n';
  }
  return 0;
}

struct SweepArgs {
  std::string eps = "0:0.2:0.01", out, spec, target = "uniform";
  std::size_t labeled_tokens = 0;
  std::size_t docs = 0;
  std::uint64_t seed = 1;
};

int cmd_sweep(Run& run, const Globals& g, const SweepArgs& a) {
  const LabelSet labels = load_labels(run, g);
  CorpusSpec spec;
  spec.label_set = labels;
  if (!a.spec.empty()) {
    std::istringstream in(run.input(a.spec));
    spec = io::read_corpus_spec(in, a.spec, labels);
  }
  if (a.labeled_tokens > 0) spec.labeled_tokens_per_doc = spread_label_quota(a.labeled_tokens, labels);
  if (a.docs > 0) spec.num_documents = a.docs;
  const auto rows = sweep(spec, parse_range(a.eps), parse_confusion_target(a.target), a.seed);

  std::ostringstream csv;
  csv << "epsilon,avg_f1,dip,expected_dip\n";
  for (const auto& r : rows) {
    csv << report::fixed3(r.epsilon) << ',' << report::fixed3(r.avg_f1) << ',' << report::fixed3(r.dip) << ','
        << report::fixed3(r.expected_dip) << '\n';
  }
  run.write_with_manifest(a.out, csv.str(),
                          Json{{"corpus_spec", io::corpus_spec_to_json(spec)},
                               {"eps", a.eps},
                               {"confusion_target", a.target},
                               {"noise_seed", a.seed}});
  if (!run.quiet()) run.out() << csv.str();
  return 0;
}

struct CompareArgs {
  std::string a, b, out;
};

report::Summary load_summary(Run& run, const std::string& path) {
  const std::string text = run.input(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(FormatError::Kind::Parse, path, 0, e.what());
  }
  auto s = report::summary_from_json(j, path);
  if (s.name.empty()) s.name = fs::path(path).stem().string();
  return s;
}

int cmd_compare(Run& run, const Globals&, const CompareArgs& a) {
  const auto c = report::compare(load_summary(run, a.a), load_summary(run, a.b));
  if (!a.out.empty()) {
    const std::string ext = lower_extension(a.out);
    if (ext == ".json") {
      run.write_json(a.out, report::comparison_to_json(c));
    } else if (ext == ".csv") {
      run.write_with_manifest(a.out, report::render_comparison_csv(c));
    } else {
      throw ValidationError("--out must end in .json or .csv");
    }
  }
  if (!run.quiet()) run.out() << report::render_comparison(c);
  return 0;
}

// ---------------------------------------------------------------------------

void diagnose(std::ostream& err, std::string_view kind, const std::string& message, const std::string& source = {},
              std::size_t line = 0) {
  Json d{{"error", std::string(kind)}, {"message", message}};
  if (!source.empty()) d["source"] = source;
  if (line > 0) d["line"] = line;
  err << d.dump() << '\n';
}

std::string_view kind_name(FormatError::Kind k) {
  switch (k) {
    case FormatError::Kind::Parse:
      return "parse";
    case FormatError::Kind::Schema:
      return "schema";
    case FormatError::Kind::Io:
      return "io";
  }
  return "io";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Token-classification evaluation with Document Integrity Precision", "dipeval"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--labels", g.labels_path, "Label-set JSON (default: receipt label set)");
  app.add_flag("--quiet", g.quiet, "Suppress tables on stdout");

  AlignArgs align_args;
  auto* align = app.add_subcommand("align", "Derive token labels from field values");
  align->add_option("--ocr", align_args.ocr, "OCR corpus JSONL")->required();
  align->add_option("--fields", align_args.fields, "Field values JSONL")->required();
  align->add_option("--policy", align_args.policy, "Match policy JSON");
  align->add_option("--out", align_args.out, "Annotated corpus JSONL")->required();
  align->add_option("--audit", align_args.audit, "Omission/tie audit JSONL")->required();

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "Split a corpus by scenario S1 or S2");
  split_cmd->add_option("--corpus", split_args.corpus)->required();
  split_cmd->add_option("--scenario", split_args.scenario)->check(CLI::IsMember({"s1", "s2", "S1", "S2"}));
  split_cmd->add_option("--train-frac", split_args.train_frac);
  split_cmd->add_option("--seed", split_args.seed);
  split_cmd->add_option("--out-train", split_args.out_train)->required();
  split_cmd->add_option("--out-test", split_args.out_test)->required();

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Per-class F1 and DIP");
  eval_cmd->add_option("--corpus", eval_args.corpus)->required();
  eval_cmd->add_option("--preds", eval_args.preds)->required();
  eval_cmd->add_option("--scope", eval_args.scope)->check(CLI::IsMember({"all", "non-none"}));
  eval_cmd->add_option("--out", eval_args.out, "Report path (.json or .csv)");
  eval_cmd->add_option("--failures", eval_args.failures, "Failure extracts per class");
  eval_cmd->add_option("--name", eval_args.name, "Scenario name stored in the report");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic corpus and noisy predictions");
  sim->add_option("--spec", sim_args.spec, "Corpus spec JSON");
  sim->add_option("--noise", sim_args.noise, "Noise spec JSON");
  sim->add_option("--out-corpus", sim_args.out_corpus)->required();
  sim->add_option("--out-preds", sim_args.out_preds)->required();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Average F1 and DIP over a grid of error rates");
  sweep_cmd->add_option("--eps", sweep_args.eps, "start:stop:step");
  sweep_cmd->add_option("--out", sweep_args.out, "CSV path")->required();
  sweep_cmd->add_option("--spec", sweep_args.spec, "Corpus spec JSON");
  sweep_cmd->add_option("--labeled-tokens", sweep_args.labeled_tokens, "Labeled tokens per document");
  sweep_cmd->add_option("--docs", sweep_args.docs, "Number of documents");
  sweep_cmd->add_option("--seed", sweep_args.seed, "Noise seed");
  sweep_cmd->add_option("--target", sweep_args.target)->check(CLI::IsMember({"uniform", "to-none"}));

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "Side-by-side F1 and DIP of two reports");
  cmp->add_option("report_a", cmp_args.a)->required();
  cmp->add_option("report_b", cmp_args.b)->required();
  cmp->add_option("--out", cmp_args.out, "Comparison path (.json or .csv)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "dipeval " << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    diagnose(err, "usage", e.what());
    return 2;
  }

  const auto sub = app.get_subcommands().front();
  Run run(sub->get_name(), args, out, g.quiet);
  try {
    if (sub == align) return cmd_align(run, g, align_args);
    if (sub == split_cmd) return cmd_split(run, g, split_args);
    if (sub == eval_cmd) return cmd_evaluate(run, g, eval_args);
    if (sub == sim) return cmd_simulate(run, g, sim_args);
    if (sub == sweep_cmd) return cmd_sweep(run, g, sweep_args);
    return cmd_compare(run, g, cmp_args);
  } catch (const FormatError& e) {
    diagnose(err, kind_name(e.kind()), e.what(), e.source(), e.line());
    return 2;
  } catch (const ValidationError& e) {
    diagnose(err, "validation", e.what());
    return 1;
  } catch (const std::exception& e) {
    diagnose(err, "internal", e.what());
    return 1;
  }
}

}  // namespace dip::cli
