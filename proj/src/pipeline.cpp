#include "assortify/pipeline.hpp"

#include "assortify/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <iostream>
#include <stdexcept>

namespace assortify::pipeline {

namespace fs = std::filesystem;
using config::ConfigError;
using config::PipelineConfig;
using io::json;

namespace {

json artifact_meta(const PipelineConfig& cfg, const std::string& command,
                   json seeds = json::object()) {
  json meta = {{"command", command}, {"config_hash", cfg.hash}};
  if (!seeds.empty()) meta["seeds"] = std::move(seeds);
  return meta;
}

corpus::CorpusOptions corpus_options(const PipelineConfig& cfg) {
  corpus::CorpusOptions options;
  options.quantile = cfg.corpus.quantile;
  options.min_token_frequency = cfg.corpus.min_token_frequency;
  options.v_img = cfg.corpus.v_img;
  options.layer_offsets = cfg.corpus.layers;
  options.stopwords = cfg.corpus.stopword_file.empty()
                          ? corpus::default_stopwords()
                          : corpus::load_stopwords(cfg.corpus.stopword_file);
  return options;
}

void cmd_synth(const PipelineConfig& cfg) {
  const synth::SyntheticCatalog catalog = synth::generate_catalog(cfg.synth);
  const std::uint64_t feedback_seed = cfg.synth.seed + 1;
  const synth::Feedback feedback = synth::generate_feedback(
      catalog.truth, cfg.synth.n_sessions, cfg.synth.n_users, feedback_seed);

  const json meta = artifact_meta(
      cfg, "synth", {{"seed", cfg.synth.seed}, {"feedback_seed", feedback_seed}});
  io::write_catalog(cfg.catalog_path(), catalog.products, &meta);
  io::write_activations(cfg.activations_path(), catalog.activations, &meta);
  io::write_sessions(cfg.sessions_path(), feedback.sessions, &meta);
  io::write_purchases(cfg.purchases_path(), feedback.purchases, &meta);
  io::write_ground_truth(cfg.ground_truth_path(), catalog.truth, &meta);
}

void cmd_build_docs(const PipelineConfig& cfg) {
  const auto catalog = io::read_catalog(cfg.catalog_path());
  const auto activations = io::read_activations(cfg.activations_path());
  const corpus::CorpusBuildResult result =
      corpus::build_documents(catalog, activations, corpus_options(cfg));

  const json meta = artifact_meta(cfg, "build-docs");
  io::write_documents(cfg.documents_path(), result.tuples, &meta);
  io::VocabularySidecar vocab;
  vocab.text_tokens = result.text_vocab.token_of;
  vocab.visual_labels = result.visual_labels;
  vocab.quantile = result.thresholds.quantile;
  vocab.thresholds = result.thresholds.threshold;
  io::write_vocabulary(cfg.vocabulary_path(), vocab, &meta);
}

void cmd_train(const PipelineConfig& cfg) {
  const auto tuples = io::read_documents(cfg.documents_path());
  const auto vocab = io::read_vocabulary(cfg.vocabulary_path());
  const topicmodel::TupleCorpus corpus = topicmodel::make_corpus(
      tuples, cfg.topicmodel.variant,
      static_cast<int>(vocab.thresholds.size()),
      static_cast<int>(vocab.text_tokens.size()));

  topicmodel::TrainConfig train;
  train.topics = cfg.topicmodel.topics;
  train.alpha_sum = cfg.topicmodel.alpha_sum;
  train.beta = cfg.topicmodel.beta;
  train.iterations = cfg.topicmodel.iterations;
  train.seed = cfg.topicmodel.seed;
  const topicmodel::PolyTopicModel model = topicmodel::train(corpus, train);

  const json meta = artifact_meta(cfg, "train", {{"seed", cfg.topicmodel.seed}});
  io::save_model(cfg.model_dir_path(), model, &meta);
}

void cmd_infer(const PipelineConfig& cfg) {
  const auto model = io::load_model(cfg.model_dir_path());
  const auto tuples = io::read_documents(cfg.documents_path());

  std::vector<std::string> ids;
  Matrix theta(static_cast<Eigen::Index>(tuples.size()), model.num_topics);
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    std::vector<std::vector<int>> tokens(model.languages.size());
    for (std::size_t l = 0; l < model.languages.size(); ++l) {
      if (model.languages[l] == "visual" && tuples[i].visual.has_value()) {
        tokens[l] = tuples[i].visual->word_ids;
      } else if (model.languages[l] == "text" && tuples[i].text.has_value()) {
        tokens[l] = tuples[i].text->tokens;
      }
    }
    // Per-document fold-in stream: base seed offset by the document ordinal.
    const std::uint64_t doc_seed = cfg.topicmodel.seed + 1 + i;
    theta.row(static_cast<Eigen::Index>(i)) =
        topicmodel::infer_theta(model, tokens, cfg.topicmodel.infer_sweeps, doc_seed)
            .transpose();
    ids.push_back(tuples[i].product_id);
  }

  const json meta = artifact_meta(cfg, "infer", {{"seed", cfg.topicmodel.seed}});
  io::write_thetas(cfg.inferred_path(), ids, theta, &meta);
}

void cmd_fit_metric(const PipelineConfig& cfg) {
  const auto purchases = io::read_purchases(cfg.purchases_path());
  const auto thetas = io::read_thetas(cfg.model_dir_path() / "theta.jsonl");
  const auto vectors = compatibility::build_purchase_vectors(
      purchases, thetas, cfg.metric.window_days, cfg.metric.min_items,
      cfg.metric.max_items);
  const auto metric = compatibility::fit_metric(
      vectors, compatibility::metric_mode_from_string(cfg.metric.mode),
      cfg.metric.lambda);

  const json meta = artifact_meta(cfg, "fit-metric");
  io::write_metric(cfg.metric_path(), metric, &meta);
}

void cmd_seeds(const PipelineConfig& cfg) {
  const auto sessions = io::read_sessions(cfg.sessions_path());
  const auto catalog = io::read_catalog(cfg.catalog_path());
  std::map<std::string, std::string> vertical_of;
  for (const auto& p : catalog) vertical_of[p.id] = p.vertical;

  const auto seeds = assort::generate_seeds(sessions, vertical_of,
                                            cfg.assort.seed_vertical_a,
                                            cfg.assort.seed_vertical_b,
                                            cfg.assort.top_n);

  const json meta = artifact_meta(cfg, "seeds");
  io::write_seeds(cfg.seeds_path(), seeds, &meta);
}

struct SolverInputs {
  std::map<std::string, Product> products;
  std::map<std::string, Vector> thetas;
  std::vector<assort::Candidate> pool;
  compatibility::CompatibilityMetric metric;
  std::vector<assort::Seed> seeds;
};

SolverInputs load_solver_inputs(const PipelineConfig& cfg) {
  SolverInputs in;
  for (auto& p : io::read_catalog(cfg.catalog_path())) in.products[p.id] = p;
  in.thetas = io::read_thetas(cfg.model_dir_path() / "theta.jsonl");
  in.metric = io::read_metric(cfg.metric_path());
  in.seeds = io::read_seeds(cfg.seeds_path());

  std::map<std::string, bool> wanted;
  for (const auto& c : cfg.assort.verticals) wanted[c.vertical] = true;
  for (const auto& [id, theta] : in.thetas) {
    const auto it = in.products.find(id);
    if (it == in.products.end() || !wanted.count(it->second.vertical)) continue;
    in.pool.push_back(assort::Candidate{id, it->second.vertical,
                                        it->second.price_cents, theta});
  }
  return in;
}

assort::SeedPair make_seed_pair(const SolverInputs& in, const assort::Seed& seed) {
  const auto lookup = [&](const std::string& id) {
    const auto p = in.products.find(id);
    const auto t = in.thetas.find(id);
    if (p == in.products.end() || t == in.thetas.end()) {
      throw std::runtime_error("seed references unknown product: " + id);
    }
    return assort::Candidate{id, p->second.vertical, p->second.price_cents,
                             t->second};
  };
  assort::SeedPair pair;
  pair.first = lookup(seed.couch_set);
  pair.second = lookup(seed.coffee_table);
  pair.coclick_count = seed.coclick_count;
  return pair;
}

void cmd_assort(const PipelineConfig& cfg) {
  const SolverInputs in = load_solver_inputs(cfg);
  std::vector<assort::Assortment> assortments;
  for (const auto& seed : in.seeds) {
    const assort::SeedPair pair = make_seed_pair(in, seed);
    if (cfg.assort.solver == "qkp") {
      assortments.push_back(assort::greedy_qkp(pair, in.pool, in.metric,
                                               cfg.assort.budget_cents,
                                               cfg.assort.verticals,
                                               cfg.assort.max_passes));
    } else {
      assortments.push_back(assort::generate_assortment(
          pair, in.pool, in.metric, cfg.assort.verticals, cfg.assort.epsilon,
          cfg.assort.max_iters));
    }
  }
  const json meta = artifact_meta(cfg, "assort");
  io::write_assortments(cfg.assortments_path(), assortments, &meta);
}

void cmd_oracle(const PipelineConfig& cfg) {
  const SolverInputs in = load_solver_inputs(cfg);
  std::vector<assort::Assortment> assortments;
  for (const auto& seed : in.seeds) {
    const assort::SeedPair pair = make_seed_pair(in, seed);
    assortments.push_back(synth::brute_force_qkp(pair, in.pool, in.metric,
                                                 cfg.assort.budget_cents,
                                                 cfg.assort.verticals));
  }
  const json meta = artifact_meta(cfg, "oracle");
  io::write_assortments(cfg.oracle_path(), assortments, &meta);
}

void cmd_eval(const PipelineConfig& cfg) {
  const auto sessions = io::read_sessions(cfg.sessions_path());
  const auto assortments = io::read_assortments(cfg.assortments_path());
  const auto thetas = io::read_thetas(cfg.model_dir_path() / "theta.jsonl");
  const eval::SessionIndex index(sessions);

  std::vector<eval::AssortmentScore> scores;
  for (const auto& a : assortments) {
    std::vector<std::string> member_ids;
    std::vector<Vector> member_thetas;
    for (const auto& [vertical, ids] : a.members) {
      for (const auto& id : ids) {
        member_ids.push_back(id);
        const auto it = thetas.find(id);
        if (it == thetas.end()) {
          throw std::runtime_error("assortment references unknown product: " + id);
        }
        member_thetas.push_back(it->second);
      }
    }
    eval::AssortmentScore score;
    score.seed_a = a.seed.couch_set;
    score.seed_b = a.seed.coffee_table;
    score.jaccard = eval::assortment_jaccard(member_ids, a.seed.couch_set,
                                             a.seed.coffee_table, index);
    score.diversity = eval::topic_diversity(member_thetas, cfg.eval.tau);
    scores.push_back(std::move(score));
  }

  const json meta = artifact_meta(cfg, "eval");
  io::write_report(cfg.report_path(), eval::make_report(std::move(scores),
                                                        cfg.eval.tau),
                   &meta);
}

}  // namespace

DirectoryLock::DirectoryLock(const fs::path& out_dir) {
  fs::create_directories(out_dir);
  path_ = out_dir / ".assortify.lock";
  fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd_ < 0) {
    throw std::runtime_error("output directory is locked by another run: " +
                             path_.string());
  }
}

DirectoryLock::~DirectoryLock() {
  if (fd_ >= 0) {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> kCommands = {
      "synth",  "build-docs", "train",  "infer", "fit-metric",
      "seeds",  "assort",     "eval",   "oracle"};
  return kCommands;
}

void run_command(const std::string& command, const PipelineConfig& cfg) {
  if (command == "synth") {
    cmd_synth(cfg);
  } else if (command == "build-docs") {
    cmd_build_docs(cfg);
  } else if (command == "train") {
    cmd_train(cfg);
  } else if (command == "infer") {
    cmd_infer(cfg);
  } else if (command == "fit-metric") {
    cmd_fit_metric(cfg);
  } else if (command == "seeds") {
    cmd_seeds(cfg);
  } else if (command == "assort") {
    cmd_assort(cfg);
  } else if (command == "eval") {
    cmd_eval(cfg);
  } else if (command == "oracle") {
    cmd_oracle(cfg);
  } else {
    throw ConfigError("unknown command: " + command);
  }
}

int run(const std::string& command,
        const std::optional<fs::path>& config_file,
        const std::vector<std::string>& overrides) {
  try {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
      throw ConfigError("unknown command: " + command);
    }
    const PipelineConfig cfg = config::load_config(config_file, overrides);
    DirectoryLock lock(cfg.paths.out_dir);
    run_command(command, cfg);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const io::IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace assortify::pipeline
