#include "dicoss/slepian_wolf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dicoss/rng.hpp"

namespace dicoss {

namespace {

constexpr std::size_t kRateSteps = 16;

std::uint32_t reverse_bits(std::uint32_t v, int nbits) {
  std::uint32_t r = 0;
  for (int i = 0; i < nbits; ++i) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return r;
}

// Row-major GF(2) matrix as 64-bit words; column i of row r lives at
// rows[r * words + i/64] bit (i%64).
struct Gf2Matrix {
  std::size_t n = 0;
  std::size_t words = 0;
  std::vector<std::uint64_t> rows;

  explicit Gf2Matrix(std::size_t m) : n(m), words((m + 63) / 64), rows(m * ((m + 63) / 64), 0) {}

  void set(std::size_t r, std::size_t c) { rows[r * words + c / 64] ^= 1ULL << (c % 64); }
  bool get(std::size_t r, std::size_t c) const {
    return (rows[r * words + c / 64] >> (c % 64)) & 1ULL;
  }
  void xor_rows(std::size_t dst, std::size_t src) {
    std::uint64_t* d = rows.data() + dst * words;
    const std::uint64_t* s = rows.data() + src * words;
    for (std::size_t w = 0; w < words; ++w) d[w] ^= s[w];
  }
  void swap_rows(std::size_t a, std::size_t b) {
    std::swap_ranges(rows.begin() + a * words, rows.begin() + (a + 1) * words,
                     rows.begin() + b * words);
  }
};

Gf2Matrix parity_matrix(const SyndromeLadder& ladder) {
  Gf2Matrix h(ladder.block_length);
  for (std::size_t i = 0; i < ladder.block_length; ++i)
    for (std::uint32_t r : ladder.var_rows[i]) h.set(r, i);
  return h;
}

// Forward elimination; returns false if the matrix is singular. When rhs is
// non-null, it is carried along and back-substituted into the solution.
bool gf2_solve(Gf2Matrix h, std::vector<std::uint8_t>* rhs, std::vector<std::uint8_t>* solution) {
  const std::size_t m = h.n;
  std::vector<std::uint8_t> b = rhs ? *rhs : std::vector<std::uint8_t>(m, 0);
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    while (pivot < m && !h.get(pivot, col)) ++pivot;
    if (pivot == m) return false;
    if (pivot != col) {
      h.swap_rows(col, pivot);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < m; ++r)
      if (h.get(r, col)) {
        h.xor_rows(r, col);
        b[r] ^= b[col];
      }
  }
  if (solution) {
    std::vector<std::uint8_t>& x = *solution;
    x.assign(m, 0);
    for (std::size_t col = m; col-- > 0;) {
      std::uint8_t v = b[col];
      for (std::size_t c = col + 1; c < m; ++c)
        if (h.get(col, c)) v ^= x[c];
      x[col] = v;
    }
  }
  return true;
}

// De-accumulated syndrome constraints for one rate step: check c is the XOR
// of base syndrome rows inside one segment of received positions.
struct StepGraph {
  std::vector<std::uint8_t> syndrome;            // per merged check
  std::vector<std::uint32_t> edge_var;           // flat edge list
  std::vector<std::uint32_t> check_begin;        // per check, offset into edge arrays
  std::vector<std::uint32_t> var_degree;
};

StepGraph build_step_graph(const SyndromeLadder& ladder, const SwEncoding& enc, std::size_t k) {
  const std::size_t m = ladder.block_length;
  std::vector<std::uint32_t> pos(ladder.tx_order.begin(), ladder.tx_order.begin() + k);
  std::sort(pos.begin(), pos.end());

  StepGraph g;
  g.syndrome.resize(k);
  std::uint8_t prev = 0;
  for (std::size_t i = 0; i < k; ++i) {
    g.syndrome[i] = enc.accumulated[pos[i]] ^ prev;
    prev = enc.accumulated[pos[i]];
  }

  // Membership of one check = parity of the variable's rows falling in the
  // segment; even counts cancel over GF(2).
  std::vector<std::vector<std::uint32_t>> check_vars(k);
  g.var_degree.assign(m, 0);
  for (std::size_t v = 0; v < m; ++v) {
    std::array<std::uint32_t, 3> seg{};
    for (int e = 0; e < 3; ++e) {
      auto it = std::lower_bound(pos.begin(), pos.end(), ladder.var_rows[v][e]);
      seg[static_cast<std::size_t>(e)] = static_cast<std::uint32_t>(it - pos.begin());
    }
    std::sort(seg.begin(), seg.end());
    for (std::size_t e = 0; e < 3;) {
      std::size_t run = 1;
      while (e + run < 3 && seg[e + run] == seg[e]) ++run;
      if (run & 1) {
        check_vars[seg[e]].push_back(static_cast<std::uint32_t>(v));
        ++g.var_degree[v];
      }
      e += run;
    }
  }

  g.check_begin.resize(k + 1);
  std::size_t total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    g.check_begin[c] = static_cast<std::uint32_t>(total);
    total += check_vars[c].size();
  }
  g.check_begin[k] = static_cast<std::uint32_t>(total);
  g.edge_var.resize(total);
  for (std::size_t c = 0; c < k; ++c)
    std::copy(check_vars[c].begin(), check_vars[c].end(), g.edge_var.begin() + g.check_begin[c]);
  return g;
}

constexpr double kMsgClamp = 36.0;  // tanh(18) is still strictly below 1.0

bool checks_satisfied(const StepGraph& g, const std::vector<std::uint8_t>& bits) {
  const std::size_t k = g.syndrome.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::uint8_t x = 0;
    for (std::uint32_t e = g.check_begin[c]; e < g.check_begin[c + 1]; ++e) x ^= bits[g.edge_var[e]];
    if (x != g.syndrome[c]) return false;
  }
  return true;
}

// Syndrome-constrained belief propagation; returns the hard decision after
// early exit on syndrome satisfaction or after max_iters sweeps.
std::vector<std::uint8_t> run_bp(const StepGraph& g, std::span<const double> llrs, int max_iters) {
  const std::size_t m = llrs.size();
  const std::size_t k = g.syndrome.size();
  const std::size_t n_edges = g.edge_var.size();

  std::vector<std::uint8_t> bits(m);
  auto hard = [&](const std::vector<double>& post) {
    for (std::size_t v = 0; v < m; ++v) bits[v] = post[v] < 0.0 ? 1 : 0;
  };

  std::vector<double> posterior(llrs.begin(), llrs.end());
  hard(posterior);
  if (checks_satisfied(g, bits)) return bits;

  std::vector<double> msg_vc(n_edges);  // variable -> check, edge order matches edge_var
  std::vector<double> msg_cv(n_edges, 0.0);
  for (std::size_t e = 0; e < n_edges; ++e) msg_vc[e] = llrs[g.edge_var[e]];

  std::vector<double> prefix;
  for (int iter = 0; iter < max_iters; ++iter) {
    // check-node update via prefix/suffix tanh products
    for (std::size_t c = 0; c < k; ++c) {
      const std::uint32_t b = g.check_begin[c], e = g.check_begin[c + 1];
      const std::size_t deg = e - b;
      if (deg == 0) continue;
      prefix.assign(deg + 1, 1.0);
      for (std::size_t i = 0; i < deg; ++i)
        prefix[i + 1] = prefix[i] * std::tanh(0.5 * msg_vc[b + i]);
      double suffix = 1.0;
      const double sign = g.syndrome[c] ? -1.0 : 1.0;
      for (std::size_t i = deg; i-- > 0;) {
        double excl = prefix[i] * suffix;
        excl = std::clamp(excl, -0.9999999999999, 0.9999999999999);
        msg_cv[b + i] = sign * 2.0 * std::atanh(excl);
        suffix *= std::tanh(0.5 * msg_vc[b + i]);
      }
    }
    // variable-node update and posterior
    for (std::size_t v = 0; v < m; ++v) posterior[v] = llrs[v];
    for (std::size_t e = 0; e < n_edges; ++e) posterior[g.edge_var[e]] += msg_cv[e];
    for (std::size_t e = 0; e < n_edges; ++e)
      msg_vc[e] = std::clamp(posterior[g.edge_var[e]] - msg_cv[e], -kMsgClamp, kMsgClamp);

    hard(posterior);
    if (checks_satisfied(g, bits)) return bits;
  }
  return bits;
}

std::vector<std::uint8_t> solve_rate_one(const SwEncoding& enc, const SyndromeLadder& ladder) {
  const std::size_t m = ladder.block_length;
  std::vector<std::uint8_t> s(m);
  std::uint8_t prev = 0;
  for (std::size_t r = 0; r < m; ++r) {
    s[r] = enc.accumulated[r] ^ prev;
    prev = enc.accumulated[r];
  }
  std::vector<std::uint8_t> x;
  if (!gf2_solve(parity_matrix(ladder), &s, &x))
    throw std::logic_error("sw_decode: ladder parity matrix is singular");
  return x;
}

bool plane_matches(const std::vector<std::uint8_t>& bits, std::uint32_t checksum) {
  return crc32(pack_bits(bits)) == checksum;
}

DecodeOutcome make_outcome(std::vector<std::uint8_t> bits, std::size_t k, int step, bool ok,
                           std::size_t m) {
  DecodeOutcome out;
  out.bits = std::move(bits);
  out.syndrome_bits = k;
  out.rate_step = step;
  out.success = ok;
  out.rate_used = (static_cast<double>(k) + 32.0) / static_cast<double>(m);
  return out;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int j = 0; j < 8; ++j) c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::uint8_t b : bytes) c = table[(c ^ b) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return out;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t nbits) {
  std::vector<std::uint8_t> out(nbits, 0);
  for (std::size_t i = 0; i < nbits; ++i)
    out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
  return out;
}

std::vector<std::uint32_t> syndrome_tx_order(std::size_t m) {
  int nbits = 0;
  while ((1ull << nbits) < m) ++nbits;
  std::vector<std::uint32_t> order;
  order.reserve(m);
  order.push_back(static_cast<std::uint32_t>(m - 1));
  for (std::uint64_t v = 0; v < (1ull << nbits); ++v) {
    const std::uint32_t r = reverse_bits(static_cast<std::uint32_t>(v), nbits);
    if (r < m - 1) order.push_back(r);
  }
  return order;
}

SyndromeLadder build_ladder(std::size_t m, std::uint64_t code_seed) {
  if (m < 64) throw std::invalid_argument("build_ladder: block too short (need m >= 64)");

  SyndromeLadder ladder;
  ladder.block_length = m;
  ladder.code_seed = code_seed;
  ladder.rate_steps.resize(kRateSteps);
  for (std::size_t t = 1; t <= kRateSteps; ++t)
    ladder.rate_steps[t - 1] = (m * t) / kRateSteps;
  ladder.rate_steps.back() = m;
  ladder.tx_order = syndrome_tx_order(m);

  // (3,3)-regular graph by stub matching: three stubs per check row shuffled
  // onto the variables, duplicates within a variable repaired by random
  // swaps. Row regularity matters: plain per-variable sampling leaves a
  // fraction e^-3 of the rows empty, which makes the matrix singular. The
  // whole graph is redrawn until the parity matrix is invertible over GF(2)
  // so the rate-1 step can always recover the plane exactly.
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(mix_seed(code_seed, 0x1dca, attempt));
    std::vector<std::uint32_t> stubs(3 * m);
    for (std::size_t r = 0; r < m; ++r)
      stubs[3 * r] = stubs[3 * r + 1] = stubs[3 * r + 2] = static_cast<std::uint32_t>(r);
    for (std::size_t i = stubs.size() - 1; i > 0; --i)
      std::swap(stubs[i], stubs[rng.index(i + 1)]);

    bool clean = false;
    for (int pass = 0; pass < 64 && !clean; ++pass) {
      clean = true;
      for (std::size_t v = 0; v < m; ++v) {
        std::uint32_t* t = stubs.data() + 3 * v;
        if (t[0] != t[1] && t[0] != t[2] && t[1] != t[2]) continue;
        clean = false;
        const std::size_t dup = (t[0] == t[1]) ? 1 : 2;
        std::swap(t[dup], stubs[rng.index(stubs.size())]);
      }
    }
    if (!clean) continue;

    ladder.var_rows.assign(m, {});
    for (std::size_t v = 0; v < m; ++v) {
      ladder.var_rows[v] = {stubs[3 * v], stubs[3 * v + 1], stubs[3 * v + 2]};
      std::sort(ladder.var_rows[v].begin(), ladder.var_rows[v].end());
    }
    if (gf2_solve(parity_matrix(ladder), nullptr, nullptr)) return ladder;
  }
  throw std::logic_error("build_ladder: no invertible graph found");
}

SwEncoding sw_encode(std::span<const std::uint8_t> plane, const SyndromeLadder& ladder) {
  const std::size_t m = ladder.block_length;
  if (plane.size() != m) throw std::invalid_argument("sw_encode: plane length mismatch");
  SwEncoding enc;
  enc.accumulated.assign(m, 0);
  for (std::size_t v = 0; v < m; ++v)
    if (plane[v])
      for (std::uint32_t r : ladder.var_rows[v]) enc.accumulated[r] ^= 1;
  for (std::size_t r = 1; r < m; ++r) enc.accumulated[r] ^= enc.accumulated[r - 1];
  enc.checksum = crc32(pack_bits(plane));
  return enc;
}

DecodeOutcome sw_decode(const SwEncoding& enc, const SoftInput& soft,
                        const SyndromeLadder& ladder, int max_bp_iters) {
  const SoftInput* one = &soft;
  return best_soft_input({one, 1}, enc, ladder, max_bp_iters);
}

DecodeOutcome best_soft_input(std::span<const SoftInput> candidates, const SwEncoding& enc,
                              const SyndromeLadder& ladder, int max_bp_iters) {
  if (candidates.empty()) throw std::invalid_argument("best_soft_input: no candidates");
  const std::size_t m = ladder.block_length;
  for (const SoftInput& c : candidates)
    if (c.llrs.size() != m) throw std::invalid_argument("best_soft_input: llr length mismatch");

  const std::size_t n_steps = ladder.rate_steps.size();
  for (std::size_t t = 0; t + 1 < n_steps; ++t) {
    const std::size_t k = ladder.rate_steps[t];
    const StepGraph g = build_step_graph(ladder, enc, k);
    for (const SoftInput& cand : candidates) {
      std::vector<std::uint8_t> bits = run_bp(g, cand.llrs, max_bp_iters);
      if (plane_matches(bits, enc.checksum))
        return make_outcome(std::move(bits), k, static_cast<int>(t), true, m);
    }
  }
  std::vector<std::uint8_t> bits = solve_rate_one(enc, ladder);
  const bool ok = plane_matches(bits, enc.checksum);
  return make_outcome(std::move(bits), m, static_cast<int>(n_steps) - 1, ok, m);
}

}  // namespace dicoss
