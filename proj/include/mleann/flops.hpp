#ifndef MLEANN_FLOPS_HPP
#define MLEANN_FLOPS_HPP

#include <cstdint>

namespace mleann {

// Analytic floating-point operation counts. A multiply-add counts as two
// operations; a transcendental evaluation is charged a fixed cost.
namespace flop_cost {

inline constexpr std::uint64_t transcendental = 8;

constexpr std::uint64_t dot(std::uint64_t n) { return 2 * n; }
constexpr std::uint64_t axpy(std::uint64_t n) { return 2 * n; }
constexpr std::uint64_t scale(std::uint64_t n) { return n; }
constexpr std::uint64_t gemv(std::uint64_t rows, std::uint64_t cols) { return 2 * rows * cols; }
// Lower triangle of A * A^T for A with `rows` rows and `cols` columns.
constexpr std::uint64_t syrk(std::uint64_t rows, std::uint64_t cols) { return rows * (rows + 1) * cols; }
constexpr std::uint64_t cholesky(std::uint64_t n) { return n * n * n / 3 + n * n; }
// Forward plus backward substitution with a Cholesky factor.
constexpr std::uint64_t cholesky_solve(std::uint64_t n) { return 2 * n * n; }

}  // namespace flop_cost

/// Cumulative operation counter attributed to one training run.
class FlopLedger {
public:
  void add(std::uint64_t flops) noexcept { count_ += flops; }
  std::uint64_t count() const noexcept { return count_; }
  void reset() noexcept { count_ = 0; }

private:
  std::uint64_t count_ = 0;
};

inline void charge(FlopLedger* ledger, std::uint64_t flops) noexcept {
  if (ledger) ledger->add(flops);
}

}  // namespace mleann

#endif  // MLEANN_FLOPS_HPP
