#include "gmv/stc_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gmv/errors.hpp"
#include "gmv/normal.hpp"
#include "gmv/rng.hpp"

namespace gmv {

namespace {

bool is_ternary(std::int8_t s) { return s == -1 || s == 0 || s == 1; }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t{bytes[offset + i]} << (8 * i);
  return v;
}

}  // namespace

TernaryCode::TernaryCode(std::vector<std::int8_t> symbols) : symbols_(std::move(symbols)) {
  if (!std::all_of(symbols_.begin(), symbols_.end(), is_ternary)) {
    throw DomainError("TernaryCode: symbols must be -1, 0 or +1");
  }
}

void TernaryCode::set(std::size_t i, std::int8_t s) {
  if (!is_ternary(s)) throw DomainError("TernaryCode::set: symbol must be -1, 0 or +1");
  symbols_.at(i) = s;
}

std::size_t TernaryCode::nonzeros() const {
  return static_cast<std::size_t>(
      std::count_if(symbols_.begin(), symbols_.end(), [](std::int8_t s) { return s != 0; }));
}

TernaryCode TernaryCode::operator-() const {
  TernaryCode out(size());
  for (std::size_t i = 0; i < size(); ++i) out.symbols_[i] = static_cast<std::int8_t>(-symbols_[i]);
  return out;
}

void TernaryCode::serialize_to(std::vector<std::uint8_t>& out) const {
  put_u32(out, kMagic);
  put_u32(out, kVersion);
  put_u64(out, symbols_.size());
  for (std::int8_t s : symbols_) out.push_back(static_cast<std::uint8_t>(s));
}

std::vector<std::uint8_t> TernaryCode::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + size());
  serialize_to(out);
  return out;
}

TernaryCode TernaryCode::deserialize(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  if (bytes.size() < kHeaderSize) throw InvalidShape("TernaryCode: truncated header");
  if (get_le(bytes, 0, 4) != kMagic) throw InvalidShape("TernaryCode: bad magic");
  if (get_le(bytes, 4, 4) != kVersion) throw InvalidShape("TernaryCode: unsupported version");
  const std::uint64_t length = get_le(bytes, 8, 8);
  if (length > bytes.size() - kHeaderSize) throw InvalidShape("TernaryCode: truncated payload");
  std::vector<std::int8_t> symbols(length);
  for (std::size_t i = 0; i < length; ++i) {
    const std::uint8_t b = bytes[kHeaderSize + i];
    if (b != 0x00 && b != 0x01 && b != 0xff) {
      throw InvalidShape("TernaryCode: invalid symbol byte " + std::to_string(b));
    }
    symbols[i] = static_cast<std::int8_t>(b);
  }
  if (consumed != nullptr) *consumed = kHeaderSize + length;
  return TernaryCode(std::move(symbols));
}

std::vector<std::uint8_t> serialize_codes(std::span<const TernaryCode> codes) {
  std::vector<std::uint8_t> out;
  for (const auto& c : codes) c.serialize_to(out);
  return out;
}

std::vector<TernaryCode> deserialize_codes(std::span<const std::uint8_t> bytes) {
  std::vector<TernaryCode> codes;
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    std::size_t used = 0;
    codes.push_back(TernaryCode::deserialize(bytes.subspan(offset), &used));
    offset += used;
  }
  return codes;
}

TransformMatrix::TransformMatrix(Eigen::MatrixXd w, std::uint64_t seed)
    : w_(std::move(w)), seed_(seed) {
  if (w_.rows() == 0 || w_.rows() > w_.cols()) {
    throw InvalidShape("TransformMatrix: need 1 <= rows <= cols");
  }
}

Eigen::VectorXd TransformMatrix::project(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != cols()) {
    throw InvalidShape("TransformMatrix::project: expected dimension " + std::to_string(cols()) +
                       ", got " + std::to_string(x.size()));
  }
  return w_ * x;
}

Eigen::MatrixXd TransformMatrix::project_columns(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (static_cast<std::size_t>(x.rows()) != cols()) {
    throw InvalidShape("TransformMatrix::project_columns: row count mismatch");
  }
  return w_ * x;
}

TransformMatrix make_transform(std::size_t d, std::size_t l, std::uint64_t seed) {
  if (l == 0 || l > d) {
    throw InvalidShape("make_transform: need 1 <= l <= d (l=" + std::to_string(l) +
                       ", d=" + std::to_string(d) + ")");
  }
  const auto n = static_cast<Eigen::Index>(d);
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return TransformMatrix(q.topRows(static_cast<Eigen::Index>(l)), seed);
}

double expected_sparsity(double lambda, double sigma_x) {
  if (!(sigma_x > 0.0)) throw DomainError("expected_sparsity: sigma_x must be > 0");
  if (!(lambda >= 0.0)) throw DomainError("expected_sparsity: lambda must be >= 0");
  return 2.0 * normal::cdf(-lambda / sigma_x);
}

double lambda_from_sparsity(double s_frac, double sigma_x) {
  if (!(s_frac > 0.0 && s_frac <= 1.0)) {
    throw DomainError("lambda_from_sparsity: sparsity must lie in (0, 1]");
  }
  if (!(sigma_x > 0.0)) throw DomainError("lambda_from_sparsity: sigma_x must be > 0");
  if (s_frac == 1.0) return 0.0;
  return -sigma_x * normal::quantile(s_frac / 2.0);
}

EmbeddingParams EmbeddingParams::from_lambda(double lambda, double sigma_x) {
  return {lambda, sigma_x, expected_sparsity(lambda, sigma_x)};
}

EmbeddingParams EmbeddingParams::from_sparsity(double s_frac, double sigma_x) {
  return {lambda_from_sparsity(s_frac, sigma_x), sigma_x, s_frac};
}

TernaryCode quantize(const Eigen::Ref<const Eigen::VectorXd>& z, double threshold) {
  std::vector<std::int8_t> symbols(static_cast<std::size_t>(z.size()), 0);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] > threshold) {
      symbols[i] = 1;
    } else if (z[i] < -threshold) {
      symbols[i] = -1;
    }
  }
  return TernaryCode(std::move(symbols));
}

TernaryCode embed(const Eigen::Ref<const Eigen::VectorXd>& x, const TransformMatrix& w,
                  double lambda) {
  return quantize(w.project(x), lambda);
}

double normalized_threshold(const Eigen::Ref<const Eigen::VectorXd>& z,
                            const EmbeddingParams& params) {
  const double rms = z.norm() / std::sqrt(static_cast<double>(z.size()));
  return params.lambda * rms / params.sigma_x;
}

TernaryCode quantize_normalized(const Eigen::Ref<const Eigen::VectorXd>& z,
                                const EmbeddingParams& params) {
  // A zero vector gives threshold 0 and no coordinate strictly above it.
  return quantize(z, normalized_threshold(z, params));
}

TernaryCode embed_normalized(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const TransformMatrix& w, const EmbeddingParams& params) {
  return quantize_normalized(w.project(x), params);
}

}  // namespace gmv
