#include "lexfn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lexfn/archive.hpp"
#include "lexfn/config.hpp"
#include "lexfn/data_io.hpp"
#include "lexfn/error.hpp"
#include "lexfn/evaluation.hpp"
#include "lexfn/glf.hpp"
#include "lexfn/neighbors.hpp"
#include "lexfn/trainer.hpp"
#include "text_util.hpp"

namespace lexfn::cli {

namespace fs = std::filesystem;

namespace {

// Everything a training run needs, as given on the command line.
struct TrainArgs {
  std::string type;
  std::string rep = "full";
  std::size_t rank = 0;
  std::optional<std::string> preset;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::size_t k = 5;
  std::size_t iters = 200;
  std::optional<double> l2;
  std::size_t batch_size = 50;
  bool validate_adjectives = false;
  bool divide_by_actual = false;
  bool clamp_phi = false;
  std::string nouns;
  std::string holistic;
  std::string tuples;
  std::string counts;
  std::string vocab;
  std::string graph;
  std::string sim_vectors;
  std::string sim_scores;
  std::uint64_t p_min = 2;
  std::uint64_t q_min = 100;
  std::size_t cap = 500;
};

struct EvalArgs {
  std::vector<std::string> datasets;
  std::string mode = "compose";
  std::string shape;
  std::string p_method = "permutation";
  std::size_t permutations = 10000;
  bool items_csv = false;
  bool mixture = false;
  std::string mixture_graph;
  double mixture_alpha = 0.0;
  std::size_t mixture_k = 5;
};

struct Common {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out = ".";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Seed for every random choice");
  app->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Output directory");
}

void add_train_options(CLI::App* app, TrainArgs& t) {
  app->add_option("--type", t.type, "adjective or verb")
      ->required()
      ->check(CLI::IsMember({"adjective", "verb"}));
  app->add_option("--rep", t.rep, "full or lowrank")->check(CLI::IsMember({"full", "lowrank"}));
  app->add_option("--rank", t.rank, "Rank of low-rank tensors")->check(CLI::PositiveNumber);
  auto* preset = app->add_option("--preset", t.preset, "fix1, fix2, fix3 or var")
                     ->check(CLI::IsMember({"fix1", "fix2", "fix3", "var"}));
  app->add_option("--alpha", t.alpha, "Parameter sharing strength")
      ->check(CLI::Range(0.0, 1.0))
      ->excludes(preset);
  app->add_option("--beta", t.beta, "Fitting strength")
      ->check(CLI::NonNegativeNumber)
      ->excludes(preset);
  app->add_option("--k", t.k, "Neighbors per word")->check(CLI::PositiveNumber);
  app->add_option("--iters", t.iters, "Maximum epochs")->check(CLI::PositiveNumber);
  app->add_option("--l2", t.l2, "l2 strength (full tensors)")->check(CLI::NonNegativeNumber);
  app->add_option("--batch-size", t.batch_size, "Examples per step, 0 for the whole set");
  app->add_flag("--validate-adjectives", t.validate_adjectives, "Hold out validation tuples for adjectives too");
  app->add_flag("--divide-by-actual", t.divide_by_actual, "Divide neighbor sums by the neighbors present");
  app->add_flag("--clamp-phi", t.clamp_phi, "Clamp negative similarities to 0");
  app->add_option("--nouns", t.nouns, "Noun vectors")->required()->check(CLI::ExistingFile);
  app->add_option("--holistic", t.holistic, "Holistic phrase vectors")->required()->check(CLI::ExistingFile);
  app->add_option("--tuples", t.tuples, "Training tuples")->required()->check(CLI::ExistingFile);
  app->add_option("--counts", t.counts, "Corpus counts")->required()->check(CLI::ExistingFile);
  app->add_option("--vocab", t.vocab, "Extra words to train, one per line")->check(CLI::ExistingFile);
  auto* graph = app->add_option("--graph", t.graph, "Neighbor graph file")->check(CLI::ExistingFile);
  auto* sv = app->add_option("--sim-vectors", t.sim_vectors, "Vectors for word similarity")
                 ->check(CLI::ExistingFile)
                 ->excludes(graph);
  app->add_option("--sim-scores", t.sim_scores, "Precomputed word similarities")
      ->check(CLI::ExistingFile)
      ->excludes(graph)
      ->excludes(sv);
  app->add_option("--p-min", t.p_min, "Minimum phrase count");
  app->add_option("--q-min", t.q_min, "Minimum noun count");
  app->add_option("--cap", t.cap, "Tuples kept per word")->check(CLI::PositiveNumber);
}

void add_eval_options(CLI::App* app, EvalArgs& e, bool required) {
  auto* d = app->add_option("--dataset", e.datasets, "Rated dataset (repeatable)")->check(CLI::ExistingFile);
  if (required) d->required();
  app->add_option("--mode", e.mode, "compose, unfurl or additive")
      ->check(CLI::IsMember({"compose", "unfurl", "additive"}));
  app->add_option("--shape", e.shape, "word-pair, an-pair or svo-pair (default: detected)")
      ->check(CLI::IsMember({"word-pair", "an-pair", "svo-pair"}));
  app->add_option("--p-method", e.p_method, "permutation or t")->check(CLI::IsMember({"permutation", "t"}));
  app->add_option("--permutations", e.permutations, "Permutations for the p-value")->check(CLI::PositiveNumber);
  app->add_flag("--items-csv", e.items_csv, "Also write per-item scores");
  app->add_flag("--mixture", e.mixture, "Score the sharing mixture instead of the stored tensors");
  app->add_option("--mixture-graph", e.mixture_graph, "Neighbor graph for --mixture")->check(CLI::ExistingFile);
  app->add_option("--mixture-alpha", e.mixture_alpha, "Sharing strength for --mixture")->check(CLI::Range(0.0, 1.0));
  app->add_option("--mixture-k", e.mixture_k, "Divisor for --mixture")->check(CLI::PositiveNumber);
}

PartOfSpeech pos_of(WordKind kind) {
  return kind == WordKind::adjective ? PartOfSpeech::adjective : PartOfSpeech::verb;
}

std::vector<std::string> load_word_list(const std::string& path) {
  auto in = text::open_input(path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = text::split_ws(text::strip_cr(line));
    if (fields.empty()) continue;
    if (fields.size() != 1) throw ParseError(path, words.size() + 1, "expected one word per line");
    words.emplace_back(fields[0]);
  }
  return words;
}

TrainConfig resolve_config(const TrainArgs& t, const Common& c) {
  const Representation rep = parse_representation(t.rep);
  if (rep == Representation::lowrank && t.rank == 0) throw UsageError("--rep lowrank needs --rank");
  if (rep == Representation::full && t.rank != 0) throw UsageError("--rank only applies to --rep lowrank");
  TrainConfig config = default_train_config(rep);
  if (t.preset) apply_preset(config, find_preset(*t.preset));
  if (t.alpha) config.objective.alpha = *t.alpha;
  if (t.beta) config.objective.beta = *t.beta;
  if (t.l2) config.objective.l2_lambda = *t.l2;
  config.objective.k = t.k;
  config.objective.divide_by_actual_neighbors = t.divide_by_actual;
  config.max_iterations = t.iters;
  config.batch_size = t.batch_size;
  config.validate_adjectives = t.validate_adjectives;
  config.seed = c.seed;
  config.threads = c.threads;
  config.validate();
  return config;
}

struct TrainData {
  WordKind kind;
  Shape shape;
  TrainConfig config;
  EmbeddingTable nouns;
  EmbeddingTable holistic;
  TuplesByWord tuples;
  std::vector<std::string> vocab;
  NeighborGraph graph;
  std::vector<std::string> warnings;
};

TrainData load_train_data(const TrainArgs& t, const Common& c) {
  TrainData d;
  d.config = resolve_config(t, c);
  d.kind = parse_word_kind(t.type);
  d.nouns = load_embeddings(t.nouns);
  d.holistic = load_embeddings(t.holistic);
  const Representation rep = d.config.objective.representation;
  const std::size_t n = d.nouns.dim();
  if (d.kind == WordKind::adjective) {
    if (d.holistic.dim() != n) {
      throw RejectedInput(fmt::format("adjective phrases need {}-dimensional holistic vectors, got {}", n,
                                      d.holistic.dim()));
    }
    d.shape = rep == Representation::full ? Shape::full_adjective(n) : Shape::lowrank_adjective(n, t.rank);
  } else {
    const std::size_t s = d.holistic.dim();
    d.shape = rep == Representation::full ? Shape::full_verb(s, n) : Shape::lowrank_verb(s, n, t.rank);
  }
  const CorpusCounts counts = load_counts(t.counts);
  d.tuples = load_tuples(t.tuples, d.kind, counts, TupleFilter{t.p_min, t.q_min, t.cap}, &d.holistic,
                         &d.warnings);
  if (!t.vocab.empty()) d.vocab = load_word_list(t.vocab);
  std::set<std::string> all(d.vocab.begin(), d.vocab.end());
  for (const auto& [word, list] : d.tuples) all.insert(word);
  if (all.empty()) throw RejectedInput("nothing to train: no tuples passed the filter and no --vocab given");
  d.vocab.assign(all.begin(), all.end());

  const bool collaborative = d.config.objective.beta > 0.0 || d.config.objective.alpha > 0.0 ||
                             d.config.alpha_schedule.kind == AlphaSchedule::Kind::var;
  const PartOfSpeech pos = pos_of(d.kind);
  if (!t.graph.empty()) {
    d.graph = load_graph(t.graph, pos);
  } else if (!t.sim_vectors.empty() || !t.sim_scores.empty()) {
    SimilaritySource src = t.sim_vectors.empty() ? SimilaritySource::from_scores(load_scores(t.sim_scores))
                                                 : SimilaritySource::from_embeddings(load_embeddings(t.sim_vectors));
    std::vector<WordId> ids;
    for (const auto& w : d.vocab) ids.push_back({w, pos});
    d.graph = build_graph(src, ids, t.k, GraphOptions{t.clamp_phi});
  } else if (collaborative) {
    throw UsageError("sharing or fitting needs --graph, --sim-vectors or --sim-scores");
  } else {
    d.graph.k = t.k;
    d.graph.pos = pos;
  }
  return d;
}

class RunSpec {
 public:
  explicit RunSpec(std::string subcommand) { line("subcommand", subcommand); }

  template <typename T>
  void line(std::string_view key, const T& value) {
    text_ += fmt::format("{}={}\n", key, value);
  }
  void append(std::string_view block) { text_ += block; }

  void write(const fs::path& dir) const { text::write_file((dir / "runspec.txt").string(), text_); }

 private:
  std::string text_;
};

void echo_train(RunSpec& spec, const TrainArgs& t, const TrainData& d, const Common& c) {
  spec.line("type", t.type);
  spec.line("preset", t.preset.value_or("none"));
  spec.line("nouns", t.nouns);
  spec.line("holistic", t.holistic);
  spec.line("tuples", t.tuples);
  spec.line("counts", t.counts);
  spec.line("vocab", t.vocab.empty() ? "-" : t.vocab);
  spec.line("graph", t.graph.empty() ? "-" : t.graph);
  spec.line("sim_vectors", t.sim_vectors.empty() ? "-" : t.sim_vectors);
  spec.line("sim_scores", t.sim_scores.empty() ? "-" : t.sim_scores);
  spec.line("clamp_phi_nonnegative", t.clamp_phi);
  spec.line("p_min", t.p_min);
  spec.line("q_min", t.q_min);
  spec.line("cap", t.cap);
  spec.line("noun_dim", d.shape.noun_dim);
  spec.line("sentence_dim", d.shape.sentence_dim);
  spec.line("rank", d.shape.rank);
  spec.line("threads", c.threads);
  spec.append(d.config.describe());
}

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError(fmt::format("cannot create output directory '{}': {}", out, ec.message()));
  return dir;
}

SpearmanOptions spearman_options(const EvalArgs& e, const Common& c) {
  SpearmanOptions o;
  o.method = e.p_method == "t" ? PValueMethod::t_approx : PValueMethod::permutation;
  o.permutations = e.permutations;
  o.seed = c.seed;
  return o;
}

struct EvalOutput {
  std::string report;
  std::vector<std::pair<std::string, std::string>> csv;  // file name, contents
};

// Scores every dataset; `store` may be null in additive mode.
EvalOutput evaluate(const ParamsStore* store, const EmbeddingTable& vectors, const EvalArgs& e,
                    const Common& c, std::string_view prefix = {}) {
  const ScoreMode mode = parse_score_mode(e.mode);
  if (mode != ScoreMode::additive && !store) throw UsageError("--mode compose/unfurl needs a model");
  EvalOutput out;
  for (const auto& path : e.datasets) {
    const EvalShape shape = e.shape.empty() ? detect_eval_shape(path) : parse_eval_shape(e.shape);
    const auto items = load_eval_dataset(path, shape);
    const std::string name = fs::path(path).stem().string();
    const auto scored = mode == ScoreMode::additive
                            ? score_items(items, [&](const EvalItem& it) { return additive_score(vectors, it); },
                                          spearman_options(e, c))
                            : score_dataset(*store, vectors, items, mode, spearman_options(e, c));
    out.report += std::string(prefix) + format_report_line(name, mode, scored);
    if (e.items_csv) out.csv.emplace_back(name + "_items.csv", format_item_csv(scored));
  }
  return out;
}

int cmd_train(const TrainArgs& t, const Common& c, std::ostream& out, std::ostream& err) {
  const TrainData d = load_train_data(t, c);
  const fs::path dir = prepare_out(c.out);
  RunSpec spec("train");
  echo_train(spec, t, d, c);
  spec.write(dir);
  for (const auto& w : d.warnings) err << "warning: " << w << '\n';
  auto result = fit(d.vocab, d.tuples, d.graph, d.nouns, d.holistic, d.shape, d.config);
  save_model(result.params, (dir / "model.arc").string(), d.config.describe());
  text::write_file((dir / "train_report.tsv").string(), result.report.format());
  text::write_file((dir / "graph.tsv").string(), format_graph(d.graph));
  out << fmt::format("trained {} words into {}\n", result.params.size(), (dir / "model.arc").string());
  return kExitOk;
}

int cmd_eval(const std::string& model, const std::string& vectors_path, const EvalArgs& e,
             const Common& c, std::ostream& out) {
  const fs::path dir = prepare_out(c.out);
  RunSpec spec("eval");
  spec.line("model", model.empty() ? "-" : model);
  spec.line("vectors", vectors_path.empty() ? "-" : vectors_path);
  for (const auto& d : e.datasets) spec.line("dataset", d);
  spec.line("mode", e.mode);
  spec.line("shape", e.shape.empty() ? "detect" : e.shape);
  spec.line("p_method", e.p_method);
  spec.line("permutations", e.permutations);
  spec.line("mixture", e.mixture);
  spec.line("mixture_graph", e.mixture_graph.empty() ? "-" : e.mixture_graph);
  spec.line("mixture_alpha", e.mixture_alpha);
  spec.line("mixture_k", e.mixture_k);
  spec.line("seed", c.seed);
  spec.write(dir);

  std::optional<ParamsStore> store;
  if (!model.empty()) store = load_model(model);
  if (e.mixture) {
    if (!store || e.mixture_graph.empty()) throw UsageError("--mixture needs --model and --mixture-graph");
    ObjectiveConfig oc;
    oc.k = e.mixture_k;
    store = mixture_store(*store, load_graph(e.mixture_graph, pos_of(store->shape().kind)), e.mixture_alpha, oc);
  }
  EmbeddingTable vectors;
  if (!vectors_path.empty()) vectors = load_embeddings(vectors_path);
  else if (e.mode != "unfurl") throw UsageError(fmt::format("--mode {} needs --nouns", e.mode));

  const auto result = evaluate(store ? &*store : nullptr, vectors, e, c);
  text::write_file((dir / "eval_report.tsv").string(), result.report);
  for (const auto& [name, csv] : result.csv) text::write_file((dir / name).string(), csv);
  out << result.report;
  return kExitOk;
}

std::string percent_label(double p) { return fmt::format("{}", p); }

int cmd_ablate(const TrainArgs& t, const std::string& axis, const std::vector<double>& percents,
               const EvalArgs& e, const Common& c, std::ostream& out, std::ostream& err) {
  const TrainData d = load_train_data(t, c);
  const fs::path dir = prepare_out(c.out);
  RunSpec spec("ablate");
  spec.line("axis", axis);
  std::string plist;
  for (double p : percents) plist += (plist.empty() ? "" : ",") + percent_label(p);
  spec.line("percents", plist);
  for (const auto& ds : e.datasets) spec.line("dataset", ds);
  spec.line("mode", e.mode);
  spec.line("p_method", e.p_method);
  spec.line("permutations", e.permutations);
  echo_train(spec, t, d, c);
  spec.write(dir);
  for (const auto& w : d.warnings) err << "warning: " << w << '\n';

  std::string summary;
  for (double p : percents) {
    const TuplesByWord kept = axis == "tuples" ? ablate_tuples(d.tuples, p, c.seed) : ablate_words(d.tuples, p, c.seed);
    auto result = fit(d.vocab, kept, d.graph, d.nouns, d.holistic, d.shape, d.config);
    const fs::path sub = prepare_out((dir / ("p" + percent_label(p))).string());
    save_model(result.params, (sub / "model.arc").string(), d.config.describe());
    text::write_file((sub / "train_report.tsv").string(), result.report.format());
    if (!e.datasets.empty()) {
      const auto ev = evaluate(&result.params, d.nouns, e, c, fmt::format("{}\t{}\t", axis, percent_label(p)));
      text::write_file((sub / "eval_report.tsv").string(), ev.report);
      for (const auto& [name, csv] : ev.csv) text::write_file((sub / name).string(), csv);
      summary += ev.report;
    } else {
      std::size_t with_data = 0, tuples = 0;
      for (const auto& [w, list] : kept) {
        with_data += list.empty() ? 0 : 1;
        tuples += list.size();
      }
      summary += fmt::format("{}\t{}\t{}\t{}\n", axis, percent_label(p), with_data, tuples);
    }
  }
  text::write_file((dir / "ablation.tsv").string(), summary);
  out << summary;
  return kExitOk;
}

struct NeighborArgs {
  std::string type = "adjective";
  std::string sim_vectors;
  std::string sim_scores;
  std::string vocab;
  std::size_t k = 5;
  bool clamp_phi = false;
  std::string model;
  std::vector<std::string> words;
  std::size_t top = 10;
  bool diagnostics = false;
};

int cmd_neighbors(const NeighborArgs& a, const Common& c, std::ostream& out) {
  const fs::path dir = prepare_out(c.out);
  RunSpec spec("neighbors");
  spec.line("model", a.model.empty() ? "-" : a.model);
  spec.line("type", a.type);
  spec.line("sim_vectors", a.sim_vectors.empty() ? "-" : a.sim_vectors);
  spec.line("sim_scores", a.sim_scores.empty() ? "-" : a.sim_scores);
  spec.line("vocab", a.vocab.empty() ? "-" : a.vocab);
  spec.line("k", a.k);
  spec.line("clamp_phi_nonnegative", a.clamp_phi);
  for (const auto& w : a.words) spec.line("word", w);
  spec.line("top", a.top);
  spec.line("diagnostics", a.diagnostics);
  spec.write(dir);

  if (!a.model.empty()) {
    const ParamsStore store = load_model(a.model);
    std::string text;
    const auto& words = a.words.empty() ? store.words() : a.words;
    for (const auto& w : words) {
      for (const auto& nb : nearest_neighbors(store, w, a.top)) {
        text += fmt::format("{}\t{}\t{}\n", w, nb.word, nb.score);
      }
    }
    text::write_file((dir / "nearest.tsv").string(), text);
    out << text;
    if (a.diagnostics) {
      const auto diag = format_tensor_diagnostics(store);
      text::write_file((dir / "diagnostics.tsv").string(), diag);
      out << diag;
    }
    return kExitOk;
  }
  if (a.sim_vectors.empty() == a.sim_scores.empty()) {
    throw UsageError("neighbors needs --model, or exactly one of --sim-vectors and --sim-scores");
  }
  SimilaritySource src = a.sim_vectors.empty() ? SimilaritySource::from_scores(load_scores(a.sim_scores))
                                               : SimilaritySource::from_embeddings(load_embeddings(a.sim_vectors));
  std::vector<std::string> vocab;
  if (!a.vocab.empty()) {
    vocab = load_word_list(a.vocab);
  } else if (src.embeddings()) {
    for (const auto& [w, v] : src.embeddings()->entries()) vocab.push_back(w);
  } else {
    throw UsageError("--sim-scores needs --vocab");
  }
  const PartOfSpeech pos = pos_of(parse_word_kind(a.type));
  std::vector<WordId> ids;
  for (const auto& w : vocab) ids.push_back({w, pos});
  const auto graph = build_graph(src, ids, a.k, GraphOptions{a.clamp_phi});
  const std::string text = format_graph(graph);
  text::write_file((dir / "graph.tsv").string(), text);
  out << text;
  return kExitOk;
}

struct GlfArgs {
  std::string tuples;
  std::string counts;
  std::string nouns;
  std::string holistic;
  std::string adj_vectors;
  std::size_t min_tuples = kGlfMinTuples;
  std::size_t iters = 200;
  std::size_t batch_size = kGlfBatchSize;
  std::uint64_t p_min = 2;
  std::uint64_t q_min = 100;
  std::size_t cap = 500;
};

int cmd_glf(const GlfArgs& g, const Common& c, std::ostream& out, std::ostream& err) {
  TrainConfig config = default_train_config(Representation::full);
  config.max_iterations = g.iters;
  config.batch_size = g.batch_size;
  config.seed = c.seed;
  config.threads = c.threads;
  config.validate();

  const fs::path dir = prepare_out(c.out);
  RunSpec spec("glf");
  spec.line("tuples", g.tuples);
  spec.line("counts", g.counts);
  spec.line("nouns", g.nouns);
  spec.line("holistic", g.holistic);
  spec.line("adj_vectors", g.adj_vectors);
  spec.line("min_tuples", g.min_tuples);
  spec.line("p_min", g.p_min);
  spec.line("q_min", g.q_min);
  spec.line("cap", g.cap);
  spec.line("threads", c.threads);
  spec.append(config.describe());
  spec.write(dir);

  const auto nouns = load_embeddings(g.nouns);
  const auto holistic = load_embeddings(g.holistic);
  const auto adj_vectors = load_embeddings(g.adj_vectors);
  std::vector<std::string> warnings;
  const auto tuples = load_tuples(g.tuples, WordKind::adjective, load_counts(g.counts),
                                  TupleFilter{g.p_min, g.q_min, g.cap}, &holistic, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  const auto pretrained = glf_pretrain(tuples, nouns, holistic, g.min_tuples, config);
  const auto result = glf_train(pretrained, adj_vectors, config);
  save_glf(result.tensor, (dir / "glf.arc").string(), config.describe());

  // Matrices for every adjective that has a word vector, as a regular model.
  std::vector<std::string> words;
  for (const auto& [w, v] : adj_vectors.entries()) words.push_back(w);
  ParamsStore store(Shape::full_adjective(nouns.dim()), words);
  for (std::size_t i = 0; i < store.size(); ++i) {
    store[i] = Params::from(glf_predict(result.tensor, adj_vectors.at(store.word(i))));
  }
  save_model(store, (dir / "model.arc").string(), config.describe());
  const std::string report = fmt::format("pretrained\t{}\niterations\t{}\nfinal_loss\t{}\nstop_reason\t{}\n",
                                         pretrained.size(), result.iterations, result.final_loss,
                                         result.stagnated ? "stagnation" : "max-iters");
  text::write_file((dir / "glf_report.tsv").string(), report);
  out << report;
  return kExitOk;
}

int cmd_export(const std::string& model, const Common& c, std::ostream& out) {
  const fs::path dir = prepare_out(c.out);
  RunSpec spec("export");
  spec.line("model", model);
  spec.write(dir);
  const std::string bytes = read_file_bytes(model);
  EmbeddingTable table;
  if (bytes.find("\nkind glf\n") != std::string::npos && bytes.find("\nkind glf\n") < 64) {
    const GlfTensor g = deserialize_glf(bytes);
    auto v = g.values();
    table.insert("G", Vector(v.begin(), v.end()));
  } else {
    const ParamsStore store = deserialize_model(bytes);
    for (std::size_t i = 0; i < store.size(); ++i) table.insert(store.word(i), store[i].unfurl());
  }
  save_embeddings(table, (dir / "export.txt").string());
  out << fmt::format("exported {} entries to {}\n", table.size(), (dir / "export.txt").string());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train and evaluate adjective matrices and verb tensors", "lexfn"};
  app.require_subcommand(1);
  Common common;

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a model");
  add_train_options(train, train_args);
  add_common(train, common);

  EvalArgs eval_args;
  std::string eval_model, eval_nouns;
  auto* eval = app.add_subcommand("eval", "Score rated datasets");
  eval->add_option("--model", eval_model, "Model archive")->check(CLI::ExistingFile);
  eval->add_option("--nouns", eval_nouns, "Argument or word vectors")->check(CLI::ExistingFile);
  add_eval_options(eval, eval_args, true);
  add_common(eval, common);

  TrainArgs ablate_args;
  EvalArgs ablate_eval;
  std::string axis;
  std::vector<double> percents;
  auto* ablate = app.add_subcommand("ablate", "Train on reduced data and score each reduction");
  add_train_options(ablate, ablate_args);
  ablate->add_option("--axis", axis, "tuples or words")->required()->check(CLI::IsMember({"tuples", "words"}));
  ablate->add_option("--percents", percents, "Comma separated percentages")
      ->required()
      ->delimiter(',')
      ->check(CLI::Range(0.0, 100.0));
  add_eval_options(ablate, ablate_eval, false);
  add_common(ablate, common);

  NeighborArgs nb_args;
  auto* neighbors = app.add_subcommand("neighbors", "Export a neighbor graph or inspect a model");
  neighbors->add_option("--type", nb_args.type, "adjective or verb")->check(CLI::IsMember({"adjective", "verb"}));
  neighbors->add_option("--sim-vectors", nb_args.sim_vectors, "Vectors for word similarity")->check(CLI::ExistingFile);
  neighbors->add_option("--sim-scores", nb_args.sim_scores, "Precomputed word similarities")->check(CLI::ExistingFile);
  neighbors->add_option("--vocab", nb_args.vocab, "Words, one per line")->check(CLI::ExistingFile);
  neighbors->add_option("--k", nb_args.k, "Neighbors per word")->check(CLI::PositiveNumber);
  neighbors->add_flag("--clamp-phi", nb_args.clamp_phi, "Clamp negative similarities to 0");
  neighbors->add_option("--model", nb_args.model, "Model archive to inspect")->check(CLI::ExistingFile);
  neighbors->add_option("--word", nb_args.words, "Word to inspect (repeatable; default all)");
  neighbors->add_option("--top", nb_args.top, "Neighbors listed per word")->check(CLI::PositiveNumber);
  neighbors->add_flag("--diagnostics", nb_args.diagnostics, "Also list the largest entry of each tensor");
  add_common(neighbors, common);

  GlfArgs glf_args;
  auto* glf = app.add_subcommand("glf", "Train the GLF baseline for adjectives");
  glf->add_option("--tuples", glf_args.tuples, "Adjective tuples")->required()->check(CLI::ExistingFile);
  glf->add_option("--counts", glf_args.counts, "Corpus counts")->required()->check(CLI::ExistingFile);
  glf->add_option("--nouns", glf_args.nouns, "Noun vectors")->required()->check(CLI::ExistingFile);
  glf->add_option("--holistic", glf_args.holistic, "Holistic phrase vectors")->required()->check(CLI::ExistingFile);
  glf->add_option("--adj-vectors", glf_args.adj_vectors, "Adjective word vectors")->required()->check(CLI::ExistingFile);
  glf->add_option("--min-tuples", glf_args.min_tuples, "Tuples needed to pretrain an adjective")->check(CLI::PositiveNumber);
  glf->add_option("--iters", glf_args.iters, "Maximum epochs")->check(CLI::PositiveNumber);
  glf->add_option("--batch-size", glf_args.batch_size, "Examples per step, 0 for the whole set");
  glf->add_option("--p-min", glf_args.p_min, "Minimum phrase count");
  glf->add_option("--q-min", glf_args.q_min, "Minimum noun count");
  glf->add_option("--cap", glf_args.cap, "Tuples kept per word")->check(CLI::PositiveNumber);
  add_common(glf, common);

  std::string export_model;
  auto* exp = app.add_subcommand("export", "Write unfurled tensors as text vectors");
  exp->add_option("--model", export_model, "Model or GLF archive")->required()->check(CLI::ExistingFile);
  add_common(exp, common);

  std::vector<const char*> argv{"lexfn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_args, common, out, err);
    if (*eval) return cmd_eval(eval_model, eval_nouns, eval_args, common, out);
    if (*ablate) {
      for (double p : percents) {
        if (!(p > 0.0)) throw UsageError("--percents must be in (0, 100]");
      }
      return cmd_ablate(ablate_args, axis, percents, ablate_eval, common, out, err);
    }
    if (*neighbors) return cmd_neighbors(nb_args, common, out);
    if (*glf) return cmd_glf(glf_args, common, out, err);
    if (*exp) return cmd_export(export_model, common, out);
  } catch (const Error& e) {
    err << "error: " << category_name(e.category()) << ": " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::usage: return kExitUsage;
      case ErrorCategory::numerical_failure: return kExitNumerical;
      default: return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace lexfn::cli
