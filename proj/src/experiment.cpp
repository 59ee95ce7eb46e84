#include "gmv/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>

#include <fmt/format.h>

#include "gmv/attack.hpp"
#include "gmv/bloom.hpp"
#include "gmv/errors.hpp"
#include "gmv/partitioning.hpp"
#include "gmv/rng.hpp"
#include "gmv/stc_embedding.hpp"
#include "gmv/verification.hpp"

namespace gmv {

SignatureSet gen_signatures(std::size_t n, std::size_t d, double sigma_x, std::uint64_t seed) {
  if (n == 0 || d == 0) throw DomainError("gen_signatures: N and d must be >= 1");
  if (!(sigma_x > 0.0)) throw DomainError("gen_signatures: sigma_x must be > 0");
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma_x);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = gauss(rng);
  }
  return SignatureSet(std::move(g));
}

Eigen::VectorXd gen_query(const Eigen::Ref<const Eigen::VectorXd>& x, double sigma_n,
                          std::uint64_t seed) {
  if (!(sigma_n >= 0.0)) throw DomainError("gen_query: sigma_n must be >= 0");
  Eigen::VectorXd y = x;
  if (sigma_n == 0.0) return y;
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma_n);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += gauss(rng);
  return y;
}

std::string_view to_string(Partitioner p) {
  return p == Partitioner::kRandom ? "random" : "kmeans";
}

Partitioner parse_partitioner(std::string_view name) {
  if (name == "random") return Partitioner::kRandom;
  if (name == "kmeans" || name == "k-means") return Partitioner::kKmeans;
  throw DomainError("unknown partitioner '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw DomainError(fmt::format("config: bad value '{}' for {}", value, key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw DomainError(fmt::format("config: bad boolean '{}' for {}", value, key));
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "d") {
    d = parse_number<std::size_t>(key, value);
  } else if (key == "N") {
    n = parse_number<std::size_t>(key, value);
  } else if (key == "M") {
    m = parse_number<std::size_t>(key, value);
  } else if (key == "sigma_x") {
    sigma_x = parse_number<double>(key, value);
  } else if (key == "sigma_n") {
    sigma_n = parse_number<double>(key, value);
  } else if (key == "sparsity_grid") {
    sparsity_grid.clear();
    for (auto item : split_list(value)) sparsity_grid.push_back(parse_number<double>(key, item));
  } else if (key == "schemes") {
    schemes.clear();
    for (auto item : split_list(value)) schemes.push_back(parse_scheme(item));
  } else if (key == "partitioner") {
    partitioner = parse_partitioner(value);
  } else if (key == "trials_pos") {
    trials_pos = parse_number<std::size_t>(key, value);
  } else if (key == "trials_neg") {
    trials_neg = parse_number<std::size_t>(key, value);
  } else if (key == "normalize_signatures") {
    normalize_signatures = parse_bool(key, value);
  } else if (key == "bloom_baseline") {
    bloom_baseline = parse_bool(key, value);
  } else if (key == "kmeans_iters") {
    kmeans_iters = parse_number<std::size_t>(key, value);
  } else if (key == "kmeans_metric") {
    kmeans_metric = parse_kmeans_metric(value);
  } else {
    throw DomainError(fmt::format("config: unknown key '{}'", key));
  }
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DomainError(fmt::format("config line {}: expected key = value", line_no));
    }
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "seed = " << seed << '\n'
     << "d = " << d << '\n'
     << "N = " << n << '\n'
     << "M = " << m << '\n'
     << fmt::format("sigma_x = {:.9g}\n", sigma_x) << fmt::format("sigma_n = {:.9g}\n", sigma_n)
     << "sparsity_grid = ";
  for (std::size_t i = 0; i < sparsity_grid.size(); ++i) {
    os << (i ? ", " : "") << fmt::format("{:.9g}", sparsity_grid[i]);
  }
  os << "\nschemes = ";
  for (std::size_t i = 0; i < schemes.size(); ++i) os << (i ? ", " : "") << to_string(schemes[i]);
  os << "\npartitioner = " << to_string(partitioner) << '\n'
     << "trials_pos = " << trials_pos << '\n'
     << "trials_neg = " << trials_neg << '\n'
     << "normalize_signatures = " << (normalize_signatures ? "true" : "false") << '\n'
     << "bloom_baseline = " << (bloom_baseline ? "true" : "false") << '\n'
     << "kmeans_iters = " << kmeans_iters << '\n'
     << "kmeans_metric = " << to_string(kmeans_metric) << '\n';
  return os.str();
}

void ExperimentConfig::validate() const {
  if (d == 0 || n == 0 || m == 0 || trials_pos == 0 || trials_neg == 0 || kmeans_iters == 0) {
    throw DomainError("config: counts must be >= 1");
  }
  if (m > n) throw DomainError("config: M must not exceed N");
  if (!(sigma_x > 0.0)) throw DomainError("config: sigma_x must be > 0");
  if (!(sigma_n >= 0.0)) throw DomainError("config: sigma_n must be >= 0");
  if (schemes.empty() && !bloom_baseline) throw DomainError("config: nothing to run");
  if (!schemes.empty() && sparsity_grid.empty()) throw DomainError("config: empty sparsity grid");
  for (double s : sparsity_grid) {
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("config: sparsity values must lie in (0, 1]");
  }
}

ExperimentConfig ExperimentConfig::scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("scale must be > 0");
  auto scale = [factor](std::size_t v) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(v) * factor)));
  };
  ExperimentConfig out = *this;
  out.n = scale(n);
  out.m = std::min(m, out.n);
  out.trials_pos = scale(trials_pos);
  out.trials_neg = scale(trials_neg);
  return out;
}

// ---------------------------------------------------------------------------
// Runner

namespace {

constexpr double kTargetFp = 1e-2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct QueryBatch {
  Eigen::MatrixXd pos;                 // d x T1, noisy enrolled signatures
  std::vector<std::size_t> pos_index;  // enrolled index behind each column
  Eigen::MatrixXd neg;                 // d x T0, fresh signatures
};

QueryBatch draw_queries(const ExperimentConfig& cfg, const SignatureSet& g) {
  QueryBatch q;
  const auto d = static_cast<Eigen::Index>(cfg.d);
  q.pos.resize(d, static_cast<Eigen::Index>(cfg.trials_pos));
  q.pos_index.resize(cfg.trials_pos);
  for (std::size_t t = 0; t < cfg.trials_pos; ++t) {
    Rng rng(derive_seed(cfg.seed, {stream::kPositive, t}));
    std::uniform_int_distribution<std::size_t> pick(0, g.count() - 1);
    const std::size_t j = pick(rng);
    q.pos_index[t] = j;
    q.pos.col(static_cast<Eigen::Index>(t)) = gen_query(g.column(j), cfg.sigma_n, rng());
  }
  q.neg.resize(d, static_cast<Eigen::Index>(cfg.trials_neg));
  for (std::size_t t = 0; t < cfg.trials_neg; ++t) {
    q.neg.col(static_cast<Eigen::Index>(t)) =
        gen_signatures(1, cfg.d, cfg.sigma_x, derive_seed(cfg.seed, {stream::kNegative, t})).column(0);
  }
  return q;
}

std::vector<TernaryCode> quantize_columns(const Eigen::MatrixXd& z, const EmbeddingParams& params) {
  std::vector<TernaryCode> out;
  out.reserve(static_cast<std::size_t>(z.cols()));
  for (Eigen::Index j = 0; j < z.cols(); ++j) out.push_back(quantize_normalized(z.col(j), params));
  return out;
}

// Squared distances of every query to every representative, row-major T x M.
std::vector<long> distance_table(const std::vector<TernaryCode>& queries,
                                 const std::vector<TernaryCode>& reps) {
  std::vector<long> out(queries.size() * reps.size());
  for (std::size_t t = 0; t < queries.size(); ++t) {
    for (std::size_t k = 0; k < reps.size(); ++k) {
      out[t * reps.size() + k] = squared_distance(queries[t], reps[k]);
    }
  }
  return out;
}

double as_score(long sq) { return -std::sqrt(static_cast<double>(sq)); }

ResultRow base_row(const ExperimentConfig& cfg, const GroupAssignment& assignment) {
  ResultRow row;
  row.partitioner = std::string(cfg.m == 1 ? "none" : to_string(cfg.partitioner));
  row.n = cfg.n;
  row.m = cfg.m;
  row.d = cfg.d;
  row.sigma_x = cfg.sigma_x;
  row.sigma_n = cfg.sigma_n;
  row.n_min = assignment.n_min;
  return row;
}

ResultRow bloom_row(const ExperimentConfig& cfg, const SignatureSet& g, const QueryBatch& queries,
                    const GroupAssignment& assignment) {
  ResultRow row = base_row(cfg, assignment);
  row.scheme = "bloom";
  row.partitioner = "none";
  row.m = 1;
  row.n_min = cfg.n;
  row.auc_theory = kNaN;
  row.mse_enrolled_empirical = kNaN;
  row.mse_enrolled_theory = kNaN;
  row.lower_bound = kNaN;
  BloomParams params;
  try {
    params = tune(cfg.n, kTargetFp, 3.0, 1e-3, cfg.sigma_x, cfg.sigma_n);
    if (params.l > cfg.d) throw InfeasibleConfiguration("tuned code length exceeds d");
  } catch (const InfeasibleConfiguration& e) {
    row.status = "infeasible";
    row.auc = row.ptp_at_pfp = row.pfp_observed = row.sparsity = row.lambda = kNaN;
    row.mse_embedding = row.mse_embedding_norm = kNaN;
    return row;
  }
  const TransformMatrix w = make_transform(cfg.d, params.l, derive_seed(cfg.seed, {stream::kBloom}));
  std::vector<TernaryCode> enrolled;
  enrolled.reserve(g.count());
  const Eigen::MatrixXd zg = w.project_columns(g.matrix());
  for (Eigen::Index j = 0; j < zg.cols(); ++j) enrolled.push_back(quantize(zg.col(j), params.lambda));
  const BloomFilter filter = bloom_enroll(enrolled, params, derive_seed(cfg.seed, {stream::kBloom, 1}));

  auto answers = [&](const Eigen::MatrixXd& y) {
    const Eigen::MatrixXd z = w.project_columns(y);
    std::vector<double> out(static_cast<std::size_t>(z.cols()));
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      out[j] = bloom_query(filter, quantize(z.col(j), params.lambda)) ? 1.0 : 0.0;
    }
    return out;
  };
  const std::vector<double> pos = answers(queries.pos);
  const std::vector<double> neg = answers(queries.neg);
  row.sparsity = 2.0 * params.stats.p;
  row.lambda = params.lambda;
  row.auc = auc_mann_whitney(pos, neg);
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  row.ptp_at_pfp = mean(pos);
  row.pfp_observed = mean(neg);
  row.mse_embedding = mse_closed_form(params.lambda, cfg.sigma_x);
  row.mse_embedding_norm = row.mse_embedding / (cfg.sigma_x * cfg.sigma_x);
  return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const SignatureSet g =
      gen_signatures(cfg.n, cfg.d, cfg.sigma_x, derive_seed(cfg.seed, {stream::kSignatures}));
  const TransformMatrix w = make_transform(cfg.d, cfg.d, derive_seed(cfg.seed, {stream::kTransform}));

  GroupAssignment assignment;
  if (cfg.m == 1) {
    assignment = GroupAssignment::from_labels(std::vector<std::size_t>(cfg.n, 0), 1);
  } else if (cfg.partitioner == Partitioner::kRandom) {
    assignment = random_partition(cfg.n, cfg.m, derive_seed(cfg.seed, {stream::kPartition}));
  } else {
    assignment = kmeans_partition(g, cfg.m, derive_seed(cfg.seed, {stream::kPartition}), cfg.kmeans_iters,
                                  cfg.kmeans_metric);
  }
  const auto members = assignment.members();
  std::vector<SignatureSet> groups;
  groups.reserve(cfg.m);
  for (const auto& idx : members) groups.push_back(g.select(idx));

  const QueryBatch queries = draw_queries(cfg, g);
  std::vector<ResultRow> rows;

  if (!cfg.schemes.empty()) {
    const Eigen::MatrixXd z_pos = w.project_columns(queries.pos);
    const Eigen::MatrixXd z_neg = w.project_columns(queries.neg);
    const bool any_aoh = std::any_of(cfg.schemes.begin(), cfg.schemes.end(),
                                     [](AggregationScheme s) { return !is_hash_of_aggregate(s); });
    Eigen::MatrixXd z_sig;
    if (any_aoh) {
      z_sig = w.project_columns(cfg.normalize_signatures ? g.normalized().matrix() : g.matrix());
    }
    // Projected aggregates of the HoA schemes do not depend on lambda.
    std::optional<Eigen::MatrixXd> z_sum, z_pinv;
    std::vector<bool> pinv_deficient(cfg.m, false);
    auto aggregates = [&](AggregationScheme scheme) -> const Eigen::MatrixXd& {
      auto& slot = scheme == AggregationScheme::HoaSum ? z_sum : z_pinv;
      if (!slot) {
        Eigen::MatrixXd a(static_cast<Eigen::Index>(cfg.d), static_cast<Eigen::Index>(cfg.m));
        for (std::size_t k = 0; k < cfg.m; ++k) {
          const SignatureSet in = cfg.normalize_signatures ? groups[k].normalized() : groups[k];
          if (scheme == AggregationScheme::HoaSum) {
            a.col(static_cast<Eigen::Index>(k)) = agg_sum(in);
          } else {
            PinvAggregate p = agg_pinv(in);
            a.col(static_cast<Eigen::Index>(k)) = p.f;
            pinv_deficient[k] = p.rank_deficient;
          }
        }
        slot = w.project_columns(a);
      }
      return *slot;
    };

    for (double sparsity : cfg.sparsity_grid) {
      const EmbeddingParams params = EmbeddingParams::from_sparsity(sparsity, cfg.sigma_x);
      const std::vector<TernaryCode> q_pos = quantize_columns(z_pos, params);
      const std::vector<TernaryCode> q_neg = quantize_columns(z_neg, params);
      std::vector<TernaryCode> sig_codes;
      if (any_aoh) sig_codes = quantize_columns(z_sig, params);

      for (AggregationScheme scheme : cfg.schemes) {
        std::vector<TernaryCode> reps;
        reps.reserve(cfg.m);
        bool deficient = false;
        if (is_hash_of_aggregate(scheme)) {
          const Eigen::MatrixXd& za = aggregates(scheme);
          for (std::size_t k = 0; k < cfg.m; ++k) {
            reps.push_back(quantize_normalized(za.col(static_cast<Eigen::Index>(k)), params));
            if (scheme == AggregationScheme::HoaPinv) deficient = deficient || pinv_deficient[k];
          }
        } else {
          for (std::size_t k = 0; k < cfg.m; ++k) {
            std::vector<TernaryCode> member_codes;
            member_codes.reserve(members[k].size());
            for (std::size_t j : members[k]) member_codes.push_back(sig_codes[j]);
            reps.push_back(aggregate_codes(scheme, member_codes));
          }
        }

        const std::vector<long> d_pos = distance_table(q_pos, reps);
        const std::vector<long> d_neg = distance_table(q_neg, reps);
        std::vector<double> pos_scores(q_pos.size()), neg_scores(q_neg.size());
        std::vector<GroupScores> per_group(cfg.m);
        for (std::size_t k = 0; k < cfg.m; ++k) {
          per_group[k].n = assignment.sizes[k];
          per_group[k].neg.reserve(q_neg.size());
        }
        for (std::size_t t = 0; t < q_neg.size(); ++t) {
          const long* row = &d_neg[t * cfg.m];
          neg_scores[t] = as_score(*std::min_element(row, row + cfg.m));
          for (std::size_t k = 0; k < cfg.m; ++k) per_group[k].neg.push_back(as_score(row[k]));
        }
        for (std::size_t t = 0; t < q_pos.size(); ++t) {
          const long* row = &d_pos[t * cfg.m];
          pos_scores[t] = as_score(*std::min_element(row, row + cfg.m));
          const std::size_t home = assignment.labels[queries.pos_index[t]];
          per_group[home].pos.push_back(as_score(row[home]));
        }

        ResultRow r = base_row(cfg, assignment);
        r.scheme = std::string(to_string(scheme));
        r.sparsity = sparsity;
        r.lambda = params.lambda;
        r.auc = auc_mann_whitney(pos_scores, neg_scores);
        r.auc_theory = predict_multi_group_roc(per_group, cfg.n).global.auc;
        const TprAtFpr op = tpr_at_fpr(pos_scores, neg_scores, kTargetFp);
        r.ptp_at_pfp = op.p_tp;
        r.pfp_observed = op.p_fp;
        r.mse_embedding = mse_closed_form(params.lambda, cfg.sigma_x);
        r.mse_embedding_norm = r.mse_embedding / (cfg.sigma_x * cfg.sigma_x);
        r.rank_deficient = deficient;

        double emp = 0.0, theory = 0.0, bound = 0.0;
        for (std::size_t k = 0; k < cfg.m; ++k) {
          const AttackReport a = attack_group(scheme, groups[k], reps[k], w, params);
          const double weight = static_cast<double>(groups[k].count()) / static_cast<double>(cfg.n);
          emp += weight * a.mse_enrolled_empirical;
          theory += weight * a.mse_enrolled_theory;
          bound += weight * a.lower_bound;
        }
        r.mse_enrolled_empirical = emp;
        r.mse_enrolled_theory = theory;
        r.lower_bound = bound;
        rows.push_back(std::move(r));
      }
    }
  }

  if (cfg.bloom_baseline) rows.push_back(bloom_row(cfg, g, queries, assignment));
  return rows;
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "scheme,partitioner,N,M,d,sigma_x,sigma_n,sparsity,lambda,n_min,auc,auc_theory,"
        "ptp_at_pfp_1e-2,pfp_observed,mse_embedding,mse_embedding_norm,mse_enrolled_empirical,"
        "mse_enrolled_theory,lower_bound,rank_deficient,status\n";
  for (const auto& r : rows) {
    os << fmt::format(
        "{},{},{},{},{},{:.9g},{:.9g},{:.9g},{:.9g},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},"
        "{:.9g},{:.9g},{:.9g},{},{}\n",
        r.scheme, r.partitioner, r.n, r.m, r.d, r.sigma_x, r.sigma_n, r.sparsity, r.lambda, r.n_min,
        r.auc, r.auc_theory, r.ptp_at_pfp, r.pfp_observed, r.mse_embedding, r.mse_embedding_norm,
        r.mse_enrolled_empirical, r.mse_enrolled_theory, r.lower_bound, r.rank_deficient ? 1 : 0,
        r.status);
  }
}

// ---------------------------------------------------------------------------
// Presets

std::vector<std::string> preset_names() {
  return {"fig-compare", "fig-aucn", "fig-theory", "fig-msem", "bloom-baseline"};
}

namespace {

constexpr std::size_t kAucnSizes[] = {16, 32, 64, 128, 256, 512, 1024};
constexpr std::size_t kGroupCounts[] = {8, 16, 32, 64, 128, 256, 512};

ExperimentConfig paper_defaults(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.d = 1024;
  c.sigma_x = 1.0;
  c.sigma_n = 0.1;  // sigma_n^2 = 1e-2
  return c;
}

std::vector<ExperimentConfig> multi_group(std::uint64_t seed, std::size_t trials,
                                          std::span<const std::size_t> group_counts) {
  std::vector<ExperimentConfig> out;
  for (Partitioner p : {Partitioner::kRandom, Partitioner::kKmeans}) {
    for (std::size_t m : group_counts) {
      ExperimentConfig c = paper_defaults(seed);
      c.n = 4096;
      c.m = m;
      c.partitioner = p;
      c.schemes = {AggregationScheme::HoaPinv, AggregationScheme::AohSignSum};
      c.sparsity_grid = {0.6, 0.85};
      c.trials_pos = c.trials_neg = trials;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::vector<ExperimentConfig> preset_configs(std::string_view name, double scale, std::uint64_t seed) {
  std::vector<ExperimentConfig> out;
  if (name == "fig-compare") {
    ExperimentConfig c = paper_defaults(seed);
    c.n = 128;
    c.sparsity_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    c.bloom_baseline = true;
    out.push_back(c);
  } else if (name == "fig-aucn") {
    for (std::size_t n : kAucnSizes) {
      ExperimentConfig c = paper_defaults(seed);
      c.n = n;
      c.sparsity_grid = {0.2, 0.6};
      c.bloom_baseline = true;
      out.push_back(c);
    }
  } else if (name == "fig-theory") {
    out = multi_group(seed, 2000, kGroupCounts);
  } else if (name == "fig-msem") {
    out = multi_group(seed, 500, std::span(kGroupCounts).first(5));
  } else if (name == "bloom-baseline") {
    for (std::size_t n : kAucnSizes) {
      ExperimentConfig c = paper_defaults(seed);
      c.n = n;
      c.schemes.clear();
      c.bloom_baseline = true;
      out.push_back(c);
    }
  } else {
    throw DomainError("unknown preset '" + std::string(name) + "'");
  }
  for (auto& c : out) c = c.scaled(scale);
  return out;
}

}  // namespace gmv
