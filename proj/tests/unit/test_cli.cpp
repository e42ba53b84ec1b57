#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "lexfn/archive.hpp"
#include "lexfn/cli.hpp"

namespace fs = std::filesystem;
using lexfn::read_file_bytes;

namespace {

const fixtures::Corpus& corpus() {
  static const auto c = fixtures::write_corpus(fs::temp_directory_path() / "lexfn_cli_corpus", 5);
  return c;
}

std::string out_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "lexfn_cli_out" / name;
  fs::remove_all(dir);
  return dir.string();
}

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = lexfn::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// Runs the installed binary so exit codes go through a real process.
Result run_binary(const std::vector<std::string>& args) {
  const auto err_path = (fs::temp_directory_path() / "lexfn_cli_stderr.txt").string();
  std::string cmd = LEXFN_CLI_PATH;
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " >/dev/null 2>'" + err_path + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, "", read_file_bytes(err_path)};
}

std::vector<std::string> adjective_train(const std::string& out) {
  const auto& c = corpus();
  return {"train", "--type", "adjective", "--nouns", c.nouns, "--holistic", c.adj_holistic, "--tuples",
          c.adj_tuples, "--counts", c.counts, "--vocab", c.vocab, "--sim-vectors", c.adj_vectors, "--out", out};
}

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> extra) {
  base.insert(base.end(), extra);
  return base;
}

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

bool one_error_line(const std::string& err, const std::string& category) {
  return err.rfind("error: " + category + ": ", 0) == 0 && lines(err) == 1;
}

}  // namespace

TEST_CASE("train with the fix1 settings") {
  const auto out = out_dir("train_fix1");
  const auto r = run(with(adjective_train(out), {"--rep", "full", "--alpha", "0.9", "--beta", "0.01", "--k", "5",
                                                 "--iters", "30", "--l2", "0.1", "--seed", "7"}));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto store = lexfn::load_model(out + "/model.arc");
  CHECK(store.size() == corpus().adjectives.size());
  const auto report = read_file_bytes(out + "/train_report.tsv");
  CHECK(lines(report) == store.size());
  const auto spec = read_file_bytes(out + "/runspec.txt");
  CHECK(spec.find("subcommand=train\n") != std::string::npos);
  CHECK(spec.find("\nalpha=0.9\n") != std::string::npos);
  CHECK(spec.find("\nbeta=0.01\n") != std::string::npos);
  CHECK(spec.find("\nseed=7\n") != std::string::npos);
  CHECK(fs::exists(out + "/graph.tsv"));
}

TEST_CASE("presets are expanded and echoed") {
  const auto out = out_dir("train_preset");
  const auto r = run(with(adjective_train(out), {"--preset", "fix3", "--iters", "5"}));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto spec = read_file_bytes(out + "/runspec.txt");
  CHECK(spec.find("preset=fix3\n") != std::string::npos);
  CHECK(spec.find("\nalpha=0.1\n") != std::string::npos);
  CHECK(spec.find("\nbeta=0.1\n") != std::string::npos);

  const auto var = out_dir("train_var");
  REQUIRE(run(with(adjective_train(var), {"--preset", "var", "--iters", "5"})).code == 0);
  CHECK(read_file_bytes(var + "/runspec.txt").find("alpha_schedule=var\n") != std::string::npos);

  CHECK(run(with(adjective_train(out), {"--preset", "fix1", "--alpha", "0.5"})).code == 2);
  CHECK(run(with(adjective_train(out), {"--preset", "fix9"})).code == 2);
}

TEST_CASE("eval in unfurl mode") {
  const auto model = out_dir("eval_model");
  REQUIRE(run(with(adjective_train(model), {"--preset", "fix1", "--iters", "20"})).code == 0);
  const auto out = out_dir("eval_unfurl");
  const auto r = run({"eval", "--mode", "unfurl", "--dataset", corpus().adj_pairs, "--model", model + "/model.arc",
                      "--items-csv", "--out", out, "--permutations", "500"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::size_t n = corpus().adjectives.size();
  CHECK(r.out.rfind(fmt::format("simlex_adj\tunfurl\t{}\t1\t", n * (n - 1) / 2), 0) == 0);
  CHECK(read_file_bytes(out + "/eval_report.tsv") == r.out);
  const auto csv = read_file_bytes(out + "/simlex_adj_items.csv");
  CHECK(csv.rfind("item_id,model_score,gold_score\n", 0) == 0);
  CHECK(lines(csv) == n * (n - 1) / 2 + 1);

  // AN composition and the additive baseline on the same nouns
  const auto an = run({"eval", "--mode", "compose", "--dataset", corpus().an_pairs, "--model",
                       model + "/model.arc", "--nouns", corpus().nouns, "--out", out, "--p-method", "t"});
  REQUIRE_MESSAGE(an.code == 0, an.err);
  CHECK(an.out.rfind("ml10_an\tcompose\t", 0) == 0);
  const auto add = run({"eval", "--mode", "additive", "--dataset", corpus().an_pairs, "--nouns",
                        corpus().adj_vectors, "--out", out});
  // the AN items mix adjective and noun vectors, and nouns are not in this table
  CHECK(add.code == 1);
  CHECK(one_error_line(add.err, "empty-evaluation"));

  const auto mix = run({"eval", "--mode", "unfurl", "--dataset", corpus().adj_pairs, "--model", model + "/model.arc",
                        "--mixture", "--mixture-graph", model + "/graph.tsv", "--mixture-alpha", "0.9",
                        "--mixture-k", "5", "--out", out, "--permutations", "100"});
  REQUIRE_MESSAGE(mix.code == 0, mix.err);
  CHECK(mix.out.rfind("simlex_adj\tunfurl\t", 0) == 0);
}

TEST_CASE("ablation over words") {
  const auto out = out_dir("ablate_words");
  const auto r = run(with(adjective_train(out), {"--preset", "fix1", "--iters", "5", "--seed", "7", "--dataset",
                                                 corpus().adj_pairs, "--mode", "unfurl", "--permutations", "100"}));
  CHECK(r.code == 2);  // ablate flags given to train
  std::vector<std::string> args = adjective_train(out);
  args[0] = "ablate";
  const auto a = run(with(args, {"--preset", "fix1", "--iters", "5", "--seed", "7", "--axis", "words", "--percents",
                                 "1,5,30,70,100", "--dataset", corpus().adj_pairs, "--mode", "unfurl",
                                 "--permutations", "100"}));
  REQUIRE_MESSAGE(a.code == 0, a.err);
  const auto summary = read_file_bytes(out + "/ablation.tsv");
  CHECK(lines(summary) == 5);
  for (const char* p : {"1", "5", "30", "70", "100"}) {
    CHECK(fs::exists(fmt::format("{}/p{}/model.arc", out, p)));
    CHECK(summary.find(fmt::format("words\t{}\tsimlex_adj\tunfurl\t", p)) != std::string::npos);
  }

  const auto counts_out = out_dir("ablate_tuples");
  args = adjective_train(counts_out);
  args[0] = "ablate";
  const auto t = run(with(args, {"--iters", "3", "--axis", "tuples", "--percents", "10,100"}));
  REQUIRE_MESSAGE(t.code == 0, t.err);
  // 6 of 8 adjectives carry 25 tuples each
  CHECK(t.out == "tuples\t10\t6\t18\ntuples\t100\t6\t150\n");
  CHECK(run(with(args, {"--axis", "tuples", "--percents", "0"})).code == 2);
  CHECK(run(with(args, {"--axis", "tuples", "--percents", "120"})).code == 2);
}

TEST_CASE("usage errors exit with 2") {
  const auto out = out_dir("usage");
  auto r = run_binary(with(adjective_train(out), {"--rep", "lowrank"}));
  CHECK(r.code == 2);
  CHECK(one_error_line(r.err, "usage"));
  CHECK(r.err.find("--rank") != std::string::npos);

  r = run_binary(with(adjective_train(out), {"--frobnicate", "3"}));
  CHECK(r.code == 2);
  CHECK(one_error_line(r.err, "usage"));

  auto missing = adjective_train(out);
  missing[4] = corpus().dir + "/no_such_file.txt";
  r = run_binary(missing);
  CHECK(r.code == 2);
  CHECK(one_error_line(r.err, "usage"));

  r = run_binary({});
  CHECK(r.code == 2);
  CHECK(run_binary({"train", "--help"}).code == 0);

  // sharing without any neighbor source
  const auto& c = corpus();
  r = run_binary({"train", "--type", "adjective", "--nouns", c.nouns, "--holistic", c.adj_holistic, "--tuples",
                  c.adj_tuples, "--counts", c.counts, "--preset", "fix1", "--out", out});
  CHECK(r.code == 2);
  CHECK(one_error_line(r.err, "usage"));
}

TEST_CASE("numerical failure exits with 3") {
  const auto out = out_dir("diverge");
  const auto& c = corpus();
  const auto r = run_binary({"train", "--type", "adjective", "--nouns", c.nouns, "--holistic", c.huge_holistic,
                             "--tuples", c.adj_tuples, "--counts", c.counts, "--out", out, "--iters", "5"});
  CHECK(r.code == 3);
  CHECK(one_error_line(r.err, "numerical-failure"));
}

TEST_CASE("data errors exit with 1 and name their category") {
  const auto out = out_dir("data_errors");
  const auto& c = corpus();
  // verb tuples read as adjective tuples
  auto r = run_binary({"train", "--type", "adjective", "--nouns", c.nouns, "--holistic", c.adj_holistic, "--tuples",
                       c.verb_tuples, "--counts", c.counts, "--out", out});
  CHECK(r.code == 1);
  CHECK(one_error_line(r.err, "parse"));

  fixtures::write_file(out + "_bad.arc", "lexfn-archive 1\nkind adjective\n");
  r = run_binary({"eval", "--mode", "unfurl", "--dataset", c.adj_pairs, "--model", out + "_bad.arc", "--out", out});
  CHECK(r.code == 1);
  CHECK(one_error_line(r.err, "integrity"));
}

TEST_CASE("identical argv gives identical artifacts at any thread count") {
  std::vector<std::string> archives, reports;
  for (const char* threads : {"1", "1", "4"}) {
    const auto out = out_dir(fmt::format("repro_{}_{}", threads, archives.size()));
    const auto r = run(with(adjective_train(out), {"--preset", "fix1", "--iters", "15", "--seed", "11",
                                                   "--threads", threads}));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    archives.push_back(read_file_bytes(out + "/model.arc"));
    reports.push_back(read_file_bytes(out + "/train_report.tsv"));
  }
  CHECK(archives[0] == archives[1]);
  CHECK(archives[0] == archives[2]);
  CHECK(reports[0] == reports[2]);

  const auto other = out_dir("repro_seed");
  REQUIRE(run(with(adjective_train(other), {"--preset", "fix1", "--iters", "15", "--seed", "12"})).code == 0);
  CHECK(read_file_bytes(other + "/model.arc") != archives[0]);
}

TEST_CASE("verb models, low-rank models and SVO evaluation") {
  const auto out = out_dir("verbs");
  const auto& c = corpus();
  const auto r = run({"train", "--type", "verb", "--rep", "lowrank", "--rank", "2", "--nouns", c.nouns, "--holistic",
                      c.verb_holistic, "--tuples", c.verb_tuples, "--counts", c.counts, "--sim-vectors",
                      c.verb_vectors, "--preset", "fix1", "--k", "2", "--iters", "10", "--out", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto store = lexfn::load_model(out + "/model.arc");
  CHECK(store.shape() == lexfn::Shape::lowrank_verb(3, 4, 2));
  const auto e = run({"eval", "--mode", "compose", "--dataset", c.svo_pairs, "--model", out + "/model.arc", "--nouns",
                      c.nouns, "--out", out, "--permutations", "200"});
  REQUIRE_MESSAGE(e.code == 0, e.err);
  // verbs without tuples are trained only when listed in the vocabulary
  CHECK(e.out.rfind("ks14_svo\tcompose\t", 0) == 0);

  CHECK(run({"train", "--type", "verb", "--rep", "full", "--rank", "2", "--nouns", c.nouns, "--holistic",
             c.verb_holistic, "--tuples", c.verb_tuples, "--counts", c.counts, "--out", out})
            .code == 2);
}

TEST_CASE("neighbors, glf and export") {
  const auto& c = corpus();
  const auto graph_out = out_dir("nb_graph");
  const auto g = run({"neighbors", "--sim-vectors", c.adj_vectors, "--k", "2", "--out", graph_out});
  REQUIRE_MESSAGE(g.code == 0, g.err);
  CHECK(read_file_bytes(graph_out + "/graph.tsv") == g.out);
  CHECK(!g.out.empty());

  const auto model = out_dir("nb_model");
  REQUIRE(run(with(adjective_train(model), {"--preset", "fix1", "--iters", "10"})).code == 0);
  const auto inspect = out_dir("nb_inspect");
  const auto n = run({"neighbors", "--model", model + "/model.arc", "--word", c.adjectives[0], "--top", "3",
                      "--diagnostics", "--out", inspect});
  REQUIRE_MESSAGE(n.code == 0, n.err);
  CHECK(lines(read_file_bytes(inspect + "/nearest.tsv")) == 3);
  CHECK(lines(read_file_bytes(inspect + "/diagnostics.tsv")) == c.adjectives.size());
  CHECK(run({"neighbors", "--out", inspect}).code == 2);

  const auto glf = out_dir("glf");
  const auto r = run({"glf", "--tuples", c.adj_tuples, "--counts", c.counts, "--nouns", c.nouns, "--holistic",
                      c.adj_holistic, "--adj-vectors", c.adj_vectors, "--min-tuples", "20", "--iters", "20", "--out",
                      glf});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("pretrained\t6\n", 0) == 0);
  CHECK(lexfn::load_glf(glf + "/glf.arc").vector_dim() == 3);
  CHECK(lexfn::load_model(glf + "/model.arc").size() == c.adjectives.size());

  const auto exp = out_dir("export");
  REQUIRE(run({"export", "--model", model + "/model.arc", "--out", exp}).code == 0);
  CHECK(lines(read_file_bytes(exp + "/export.txt")) == c.adjectives.size());
  REQUIRE(run({"export", "--model", glf + "/glf.arc", "--out", exp}).code == 0);
  CHECK(read_file_bytes(exp + "/export.txt").rfind("G ", 0) == 0);
}
