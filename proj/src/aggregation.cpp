#include "gmv/aggregation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>

#include "gmv/errors.hpp"

namespace gmv {

SignatureSet::SignatureSet(Eigen::MatrixXd g) : g_(std::move(g)) {
  if (g_.cols() == 0) throw EmptyGroup("SignatureSet: at least one signature is required");
  if (!g_.allFinite()) throw DomainError("SignatureSet: non-finite entry");
}

Eigen::VectorXd SignatureSet::mean() const { return g_.rowwise().mean(); }

SignatureSet SignatureSet::select(std::span<const std::size_t> indices) const {
  Eigen::MatrixXd out(g_.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= count()) throw InvalidShape("SignatureSet::select: index out of range");
    out.col(static_cast<Eigen::Index>(k)) = g_.col(static_cast<Eigen::Index>(indices[k]));
  }
  return SignatureSet(std::move(out));
}

SignatureSet SignatureSet::normalized() const {
  Eigen::MatrixXd out = g_;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double n = out.col(j).norm();
    if (n > 0.0) out.col(j) /= n;
  }
  return SignatureSet(std::move(out));
}

std::string_view to_string(AggregationScheme scheme) {
  switch (scheme) {
    case AggregationScheme::HoaSum: return "hoa-sum";
    case AggregationScheme::HoaPinv: return "hoa-pinv";
    case AggregationScheme::AohSignSum: return "aoh-signsum";
    case AggregationScheme::AohMajority: return "aoh-majority";
  }
  return "unknown";
}

AggregationScheme parse_scheme(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "hoa-sum" || key == "hoa-2") return AggregationScheme::HoaSum;
  if (key == "hoa-pinv" || key == "hoa-3") return AggregationScheme::HoaPinv;
  if (key == "aoh-signsum" || key == "aoh-4") return AggregationScheme::AohSignSum;
  if (key == "aoh-majority" || key == "aoh-5") return AggregationScheme::AohMajority;
  throw DomainError("unknown aggregation scheme '" + std::string(name) + "'");
}

bool is_hash_of_aggregate(AggregationScheme scheme) {
  return scheme == AggregationScheme::HoaSum || scheme == AggregationScheme::HoaPinv;
}

Eigen::VectorXd agg_sum(const SignatureSet& g) { return g.matrix().rowwise().sum(); }

PinvAggregate agg_pinv(const SignatureSet& g) {
  const Eigen::MatrixXd& m = g.matrix();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                        (sv.size() > 0 ? sv[0] : 0.0) * 1e-12;

  // (G^+)^T 1 = U diag(1/s) V^T 1
  Eigen::VectorXd coeff = svd.matrixV().transpose() * Eigen::VectorXd::Ones(m.cols());
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff && sv[i] > 0.0) {
      coeff[i] /= sv[i];
      ++rank;
    } else {
      coeff[i] = 0.0;
    }
  }
  PinvAggregate out;
  out.f = svd.matrixU() * coeff;
  out.rank = rank;
  out.rank_deficient = rank < g.count();
  return out;
}

namespace {

void check_codes(std::span<const TernaryCode> codes, const char* who) {
  if (codes.empty()) throw EmptyGroup(std::string(who) + ": no codes");
  const std::size_t l = codes.front().size();
  for (const auto& c : codes) {
    if (c.size() != l) throw InvalidShape(std::string(who) + ": codes have different lengths");
  }
}

}  // namespace

TernaryCode agg_sign_sum(std::span<const TernaryCode> codes) {
  check_codes(codes, "agg_sign_sum");
  const std::size_t l = codes.front().size();
  std::vector<long> sum(l, 0);
  for (const auto& c : codes) {
    auto s = c.symbols();
    for (std::size_t i = 0; i < l; ++i) sum[i] += s[i];
  }
  std::vector<std::int8_t> out(l);
  for (std::size_t i = 0; i < l; ++i) out[i] = static_cast<std::int8_t>((sum[i] > 0) - (sum[i] < 0));
  return TernaryCode(std::move(out));
}

TernaryCode agg_majority(std::span<const TernaryCode> codes) {
  check_codes(codes, "agg_majority");
  const std::size_t l = codes.front().size();
  std::vector<std::array<std::size_t, 3>> counts(l, {0, 0, 0});  // -1, 0, +1
  for (const auto& c : codes) {
    auto s = c.symbols();
    for (std::size_t i = 0; i < l; ++i) ++counts[i][static_cast<std::size_t>(s[i] + 1)];
  }
  std::vector<std::int8_t> out(l, 0);
  for (std::size_t i = 0; i < l; ++i) {
    const auto [neg, zero, pos] = counts[i];
    // Any tie for the lead, including +1 against -1, resolves to 0.
    if (pos > neg && pos > zero) {
      out[i] = 1;
    } else if (neg > pos && neg > zero) {
      out[i] = -1;
    }
  }
  return TernaryCode(std::move(out));
}

TernaryCode aggregate_codes(AggregationScheme scheme, std::span<const TernaryCode> codes) {
  switch (scheme) {
    case AggregationScheme::AohSignSum: return agg_sign_sum(codes);
    case AggregationScheme::AohMajority: return agg_majority(codes);
    default: throw DomainError("aggregate_codes: scheme aggregates raw signatures");
  }
}

Representative group_representative(AggregationScheme scheme, const SignatureSet& g,
                                    const TransformMatrix& w, const EmbeddingParams& params,
                                    bool normalize) {
  if (g.dim() != w.cols()) {
    throw InvalidShape("group_representative: signature dimension does not match transform");
  }
  std::optional<SignatureSet> unit;
  if (normalize) unit.emplace(g.normalized());
  const SignatureSet& in = unit ? *unit : g;

  switch (scheme) {
    case AggregationScheme::HoaSum:
      return {embed_normalized(agg_sum(in), w, params), false};
    case AggregationScheme::HoaPinv: {
      PinvAggregate agg = agg_pinv(in);
      return {embed_normalized(agg.f, w, params), agg.rank_deficient};
    }
    case AggregationScheme::AohSignSum:
    case AggregationScheme::AohMajority: {
      const Eigen::MatrixXd z = w.project_columns(in.matrix());
      std::vector<TernaryCode> codes;
      codes.reserve(in.count());
      for (Eigen::Index j = 0; j < z.cols(); ++j) codes.push_back(quantize_normalized(z.col(j), params));
      return {aggregate_codes(scheme, codes), false};
    }
  }
  throw DomainError("group_representative: unknown scheme");
}

}  // namespace gmv
