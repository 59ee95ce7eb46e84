#pragma once

// Sparse ternary coding: a signature x is projected by a row-orthonormal
// matrix W and each coordinate of Wx is quantized to {-1, 0, +1} by a
// threshold lambda.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gmv {

class TernaryCode {
 public:
  static constexpr std::uint32_t kMagic = 0x444f4354;  // "TCOD" little-endian
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kHeaderSize = 16;

  TernaryCode() = default;
  /// All-zero code of the given length.
  explicit TernaryCode(std::size_t length) : symbols_(length, 0) {}
  /// Throws DomainError if any symbol is outside {-1, 0, +1}.
  explicit TernaryCode(std::vector<std::int8_t> symbols);
  TernaryCode(std::initializer_list<int> symbols)
      : TernaryCode(std::vector<std::int8_t>(symbols.begin(), symbols.end())) {}

  std::size_t size() const { return symbols_.size(); }
  std::int8_t operator[](std::size_t i) const { return symbols_[i]; }
  void set(std::size_t i, std::int8_t s);
  std::span<const std::int8_t> symbols() const { return symbols_; }

  std::size_t nonzeros() const;
  TernaryCode operator-() const;
  bool operator==(const TernaryCode&) const = default;

  /// 16-byte header (magic u32, version u32, length u64, all little-endian)
  /// followed by one byte per symbol: 0xff, 0x00, 0x01 for -1, 0, +1.
  std::vector<std::uint8_t> serialize() const;
  void serialize_to(std::vector<std::uint8_t>& out) const;
  /// Parses one record from the front of `bytes`; `consumed` receives the
  /// record size. Throws InvalidShape on a malformed record.
  static TernaryCode deserialize(std::span<const std::uint8_t> bytes,
                                 std::size_t* consumed = nullptr);

 private:
  std::vector<std::int8_t> symbols_;
};

/// Concatenated records, as written by the CLI `enroll` command.
std::vector<std::uint8_t> serialize_codes(std::span<const TernaryCode> codes);
std::vector<TernaryCode> deserialize_codes(std::span<const std::uint8_t> bytes);

class TransformMatrix {
 public:
  /// Takes ownership of a row-orthonormal matrix; use make_transform to build one.
  TransformMatrix(Eigen::MatrixXd w, std::uint64_t seed);

  std::size_t rows() const { return static_cast<std::size_t>(w_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(w_.cols()); }
  bool square() const { return w_.rows() == w_.cols(); }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& matrix() const { return w_; }

  /// Wx. Throws InvalidShape if x.size() != cols().
  Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// W X for a d x n matrix of column vectors.
  Eigen::MatrixXd project_columns(const Eigen::Ref<const Eigen::MatrixXd>& x) const;

 private:
  Eigen::MatrixXd w_;
  std::uint64_t seed_;
};

/// First l rows of the Q factor of a seeded d x d standard Gaussian matrix,
/// with column signs fixed so that diag(R) > 0. Deterministic in (d, l, seed).
/// Throws InvalidShape unless 1 <= l <= d.
TransformMatrix make_transform(std::size_t d, std::size_t l, std::uint64_t seed);

struct EmbeddingParams {
  double lambda = 0.0;
  double sigma_x = 1.0;
  double target_sparsity = 1.0;  ///< S/d = 2 Phi(-lambda/sigma_x)

  static EmbeddingParams from_lambda(double lambda, double sigma_x);
  static EmbeddingParams from_sparsity(double s_frac, double sigma_x);
};

/// Fraction of non-zero symbols expected for x ~ N(0, sigma_x^2 I).
double expected_sparsity(double lambda, double sigma_x);
/// Inverse of expected_sparsity in lambda.
double lambda_from_sparsity(double s_frac, double sigma_x);

/// Thresholds the coordinates of `z` at `threshold` (strict on both sides).
TernaryCode quantize(const Eigen::Ref<const Eigen::VectorXd>& z, double threshold);

/// Fixed-threshold code: symbol i is sign(w_i^T x) when |w_i^T x| > lambda.
TernaryCode embed(const Eigen::Ref<const Eigen::VectorXd>& x, const TransformMatrix& w,
                  double lambda);

/// Scale-free code used by the verification protocol. The projection is
/// rescaled to RMS sigma_x before thresholding at params.lambda, so the code
/// of c*x equals the code of x for every c > 0 and the sparsity stays at
/// params.target_sparsity whatever the magnitude of the input (aggregated
/// vectors included). A zero projection yields the all-zero code.
TernaryCode embed_normalized(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const TransformMatrix& w, const EmbeddingParams& params);
/// Same as embed_normalized applied to an already projected vector z = Wx.
TernaryCode quantize_normalized(const Eigen::Ref<const Eigen::VectorXd>& z,
                                const EmbeddingParams& params);

/// Threshold that quantize_normalized applies to z.
double normalized_threshold(const Eigen::Ref<const Eigen::VectorXd>& z,
                            const EmbeddingParams& params);

}  // namespace gmv
