#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "gmv/aggregation.hpp"
#include "gmv/attack.hpp"
#include "gmv/bloom.hpp"
#include "gmv/errors.hpp"
#include "gmv/experiment.hpp"
#include "gmv/partitioning.hpp"
#include "gmv/rng.hpp"
#include "gmv/stc_embedding.hpp"
#include "gmv/verification.hpp"

using namespace gmv;

namespace {

std::string fmt9(double v) { return fmt::format("{:.9g}", v); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

// One vector per row, header x0..x{d-1}.
SignatureSet read_vectors(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidShape(path + ": missing header");
  const std::size_t d = split(line, ',').size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != d) throw InvalidShape(fmt::format("{}: row {} has {} values, expected {}", path, rows + 1, cells.size(), d));
    for (const auto& c : cells) values.push_back(std::stod(c));
    ++rows;
  }
  if (rows == 0) throw EmptyGroup(path + ": no vectors");
  Eigen::MatrixXd m = Eigen::Map<Eigen::MatrixXd>(values.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rows));
  return SignatureSet(std::move(m));
}

void write_vectors(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) os << (i ? "," : "") << 'x' << i;
  os << '\n';
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) os << (i ? "," : "") << fmt9(m(i, j));
    os << '\n';
  }
}

std::vector<double> read_scores(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InsufficientData(path + ": empty file");
  const auto header = split(line, ',');
  std::size_t col = 0;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "score") col = i;
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(std::stod(split(line, ',').at(col)));
  }
  return out;
}

// Writes to `path`, or stdout when empty.
template <typename F>
void with_output(const std::string& path, F&& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  body(out);
}

EmbeddingParams embedding_params(double sparsity, double lambda, double sigma_x) {
  return lambda >= 0.0 ? EmbeddingParams::from_lambda(lambda, sigma_x)
                       : EmbeddingParams::from_sparsity(sparsity, sigma_x);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in = open_in(path);
  return {std::istream_iterator<std::string>(in), {}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group membership verification with sparse ternary codes"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_path;
  double sigma_x = 1.0;
  double sparsity = 0.6;
  double lambda = -1.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--out", out_path, "Output path (stdout when omitted)");
  };
  auto add_embedding = [&](CLI::App* sub) {
    sub->add_option("--sigma-x", sigma_x, "Signature standard deviation");
    sub->add_option("--sparsity", sparsity, "Target fraction of nonzero symbols");
    sub->add_option("--lambda", lambda, "Threshold (overrides --sparsity)");
  };

  // gen
  std::size_t gen_n = 128, gen_d = 1024;
  auto* gen = app.add_subcommand("gen", "Generate Gaussian signatures as CSV");
  add_common(gen);
  gen->add_option("-n,--count", gen_n, "Number of vectors");
  gen->add_option("-d,--dim", gen_d, "Dimension");
  gen->add_option("--sigma-x", sigma_x, "Standard deviation");
  double gen_noise = -1.0;
  std::string gen_from;
  gen->add_option("--noisy-from", gen_from, "Perturb the vectors of this CSV instead");
  gen->add_option("--sigma-n", gen_noise, "Noise deviation for --noisy-from");

  // enroll
  std::string sig_path, scheme_name = "hoa-pinv", part_name = "random", assign_path;
  std::size_t groups = 1;
  bool normalize = false;
  auto* enroll = app.add_subcommand("enroll", "Build group representatives");
  add_common(enroll);
  add_embedding(enroll);
  enroll->add_option("--signatures", sig_path, "Signature CSV")->required();
  enroll->add_option("--scheme", scheme_name, "hoa-sum, hoa-pinv, aoh-signsum or aoh-majority");
  enroll->add_option("-m,--groups", groups, "Number of groups");
  enroll->add_option("--partitioner", part_name, "random or kmeans");
  enroll->add_option("--assignment", assign_path, "Write the group assignment CSV here");
  enroll->add_flag("--normalize", normalize, "Rescale signatures to unit norm");
  std::string metric_name = "cosine";
  enroll->add_option("--kmeans-metric", metric_name, "cosine or euclidean");

  // verify
  std::string reps_path, query_path;
  double tau = 0.0;
  auto* verify = app.add_subcommand("verify", "Score queries against representatives");
  add_common(verify);
  add_embedding(verify);
  verify->add_option("--reps", reps_path, "Representative codes from enroll")->required();
  verify->add_option("--queries", query_path, "Query CSV")->required();
  auto* tau_opt = verify->add_option("--tau", tau, "Decision threshold");

  // roc
  std::string pos_path, neg_path;
  auto* roc = app.add_subcommand("roc", "ROC curve from positive and negative score files");
  add_common(roc);
  roc->add_option("--positive", pos_path, "Scores of enrolled queries")->required();
  roc->add_option("--negative", neg_path, "Scores of outsider queries")->required();

  // attack
  std::vector<std::size_t> attack_n{1, 2, 4, 8, 16, 32, 64, 128};
  std::vector<std::string> attack_schemes{"hoa-sum", "hoa-pinv", "aoh-signsum", "aoh-majority"};
  std::size_t attack_d = 256;
  auto* attack = app.add_subcommand("attack", "Reconstruction attack on a single group");
  add_common(attack);
  add_embedding(attack);
  attack->add_option("-d,--dim", attack_d, "Dimension");
  attack->add_option("--n-list", attack_n, "Group sizes")->delimiter(',');
  attack->add_option("--schemes", attack_schemes, "Schemes")->delimiter(',');

  // bloom-tune
  std::size_t bloom_n = 128;
  double bloom_pfp = 0.01, bloom_h = 3.0, bloom_eps = 1e-3, bloom_sigma_n = 0.1;
  bool ternary_entropy = false;
  auto* btune = app.add_subcommand("bloom-tune", "Tune the Bloom-filter baseline");
  add_common(btune);
  btune->add_option("-n,--count", bloom_n, "Group size");
  btune->add_option("--p-fp", bloom_pfp, "Target false-positive rate");
  btune->add_option("--margin", bloom_h, "Entropy margin (nats)");
  btune->add_option("--eps", bloom_eps, "All-zero code budget");
  btune->add_option("--sigma-x", sigma_x, "Signature deviation");
  btune->add_option("--sigma-n", bloom_sigma_n, "Noise deviation");
  btune->add_flag("--ternary-entropy", ternary_entropy, "Use the ternary symbol entropy");

  // experiment
  std::string preset, config_path;
  double scale = 1.0;
  auto* exp = app.add_subcommand("experiment", "Run a preset or a config file");
  add_common(exp);
  exp->add_option("preset", preset, "Preset name, or 'config' with --config");
  exp->add_option("--scale", scale, "Multiply N and trial counts");
  exp->add_option("--config", config_path, "key = value configuration file");
  bool list = false;
  exp->add_flag("--list", list, "List presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!gen_from.empty()) {
        const SignatureSet base = read_vectors(gen_from);
        Eigen::MatrixXd m(base.dim(), base.count());
        for (std::size_t j = 0; j < base.count(); ++j)
          m.col(static_cast<Eigen::Index>(j)) =
              gen_query(base.column(j), gen_noise < 0.0 ? 0.1 : gen_noise, derive_seed(seed, {stream::kPositive, j}));
        with_output(out_path, [&](std::ostream& os) { write_vectors(os, m); });
      } else {
        const SignatureSet g = gen_signatures(gen_n, gen_d, sigma_x, derive_seed(seed, {stream::kSignatures}));
        with_output(out_path, [&](std::ostream& os) { write_vectors(os, g.matrix()); });
      }
    } else if (*enroll) {
      const SignatureSet g = read_vectors(sig_path);
      const AggregationScheme scheme = parse_scheme(scheme_name);
      const EmbeddingParams params = embedding_params(sparsity, lambda, sigma_x);
      const TransformMatrix w = make_transform(g.dim(), g.dim(), derive_seed(seed, {stream::kTransform}));
      const GroupAssignment a = parse_partitioner(part_name) == Partitioner::kRandom
                                    ? random_partition(g.count(), groups, derive_seed(seed, {stream::kPartition}))
                                    : kmeans_partition(g, groups, derive_seed(seed, {stream::kPartition}),
                                                       kDefaultKmeansIters, parse_kmeans_metric(metric_name));
      std::vector<TernaryCode> reps;
      for (const auto& members : a.members()) {
        const Representative r = group_representative(scheme, g.select(members), w, params, normalize);
        if (r.rank_deficient) std::cerr << "warning: rank-deficient group\n";
        reps.push_back(r.code);
      }
      const auto bytes = serialize_codes(reps);
      with_output(out_path, [&](std::ostream& os) {
        os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      });
      if (!assign_path.empty()) with_output(assign_path, [&](std::ostream& os) { write_assignment_csv(os, a); });
    } else if (*verify) {
      std::ifstream in = open_in(reps_path);
      const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), {}};
      const std::vector<TernaryCode> reps = deserialize_codes(bytes);
      const SignatureSet q = read_vectors(query_path);
      const EmbeddingParams params = embedding_params(sparsity, lambda, sigma_x);
      const TransformMatrix w = make_transform(q.dim(), q.dim(), derive_seed(seed, {stream::kTransform}));
      with_output(out_path, [&](std::ostream& os) {
        os << (tau_opt->count() ? "index,score,decision\n" : "index,score\n");
        for (std::size_t j = 0; j < q.count(); ++j) {
          const double s = multi_group_score(embed_normalized(q.column(j), w, params), reps);
          os << j << ',' << fmt9(s);
          if (tau_opt->count()) os << ',' << (decide(s, tau) ? 1 : 0);
          os << '\n';
        }
      });
    } else if (*roc) {
      const auto pos = read_scores(pos_path);
      const auto neg = read_scores(neg_path);
      const RocCurve curve = roc_curve(pos, neg);
      with_output(out_path, [&](std::ostream& os) { write_roc_csv(os, curve); });
    } else if (*attack) {
      const EmbeddingParams params = embedding_params(sparsity, lambda, sigma_x);
      const TransformMatrix w = make_transform(attack_d, attack_d, derive_seed(seed, {stream::kTransform}));
      with_output(out_path, [&](std::ostream& os) {
        write_attack_csv_header(os);
        for (std::size_t n : attack_n) {
          const SignatureSet g = gen_signatures(n, attack_d, sigma_x, derive_seed(seed, {stream::kSignatures, n}));
          for (const auto& name : attack_schemes) {
            const AggregationScheme s = parse_scheme(name);
            const TernaryCode r = group_representative(s, g, w, params).code;
            write_attack_csv_row(os, attack_group(s, g, r, w, params));
          }
        }
      });
    } else if (*btune) {
      TuneOptions opts;
      opts.entropy = ternary_entropy ? EntropyForm::kTernary : EntropyForm::kAsPrinted;
      const BloomParams p = tune(bloom_n, bloom_pfp, bloom_h, bloom_eps, sigma_x, bloom_sigma_n, opts);
      with_output(out_path, [&](std::ostream& os) { write_bloom_params_csv(os, p); });
    } else if (*exp) {
      if (list) {
        for (const auto& name : preset_names()) std::cout << name << '\n';
        return 0;
      }
      std::vector<ExperimentConfig> configs;
      if (!config_path.empty()) {
        std::ifstream in = open_in(config_path);
        std::stringstream text;
        text << in.rdbuf();
        ExperimentConfig c = ExperimentConfig::parse(text.str());
        if (exp->get_option("--seed")->count()) c.seed = seed;
        configs.push_back(c.scaled(scale));
      } else if (!preset.empty()) {
        configs = preset_configs(preset, scale, seed);
      } else {
        throw DomainError("experiment needs a preset name or --config");
      }
      std::vector<ResultRow> rows;
      for (const auto& c : configs) {
        auto part = run_experiment(c);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      with_output(out_path, [&](std::ostream& os) { write_results_csv(os, rows); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
