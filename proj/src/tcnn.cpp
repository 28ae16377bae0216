#include "hlwnet/tcnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hlwnet/rng.hpp"

namespace hlwnet {

namespace {

Matrix relu(const Matrix& x, Matrix& mask) {
  Matrix y(x.rows(), x.cols());
  mask = Matrix(x.rows(), x.cols());
  for (std::size_t k = 0; k < x.data().size(); ++k) {
    const double v = x.data()[k];
    y.data()[k] = v > 0.0 ? v : 0.0;
    mask.data()[k] = v > 0.0 ? 1.0 : 0.0;
  }
  return y;
}

void softmax_rows(Matrix& m) {
  for (std::size_t t = 0; t < m.rows(); ++t) {
    double mx = m(t, 0);
    for (std::size_t i = 1; i < m.cols(); ++i) mx = std::max(mx, m(t, i));
    double sum = 0.0;
    for (std::size_t i = 0; i < m.cols(); ++i) {
      m(t, i) = std::exp(m(t, i) - mx);
      sum += m(t, i);
    }
    for (std::size_t i = 0; i < m.cols(); ++i) m(t, i) /= sum;
  }
}

// d(MSE)/d(logits) through the softmax, for one contiguous block of
// columns forming a softmax group.
void softmax_mse_backward_block(const Matrix& probs, const Matrix& labels,
                                std::size_t col0, std::size_t ncols, double scale,
                                Matrix& dlogits) {
  for (std::size_t t = 0; t < probs.rows(); ++t) {
    double dot = 0.0;
    for (std::size_t i = col0; i < col0 + ncols; ++i) {
      const double g = scale * (probs(t, i) - labels(t, i));
      dot += g * probs(t, i);
    }
    for (std::size_t i = col0; i < col0 + ncols; ++i) {
      const double g = scale * (probs(t, i) - labels(t, i));
      dlogits(t, i) = probs(t, i) * (g - dot);
    }
  }
}

void kaiming_uniform(Matrix& w, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.cols()));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (double& v : w.data()) v = u(rng);
}

std::uint64_t fnv1a_bytes(const void* data, std::size_t len,
                          std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------- layers

void LinearLayer::init(int out, int in) {
  w = Matrix(static_cast<std::size_t>(out), static_cast<std::size_t>(in));
  b.assign(static_cast<std::size_t>(out), 0.0);
  gw = Matrix(w.rows(), w.cols());
  gb.assign(b.size(), 0.0);
}

Matrix LinearLayer::forward(const Matrix& x, bool train) {
  if (x.cols() != w.cols()) throw std::invalid_argument("LinearLayer: shape mismatch");
  if (train) x_cache = x;
  Matrix y(x.rows(), w.rows());
  for (std::size_t t = 0; t < x.rows(); ++t)
    for (std::size_t o = 0; o < w.rows(); ++o) {
      double acc = b[o];
      for (std::size_t k = 0; k < w.cols(); ++k) acc += x(t, k) * w(o, k);
      y(t, o) = acc;
    }
  return y;
}

Matrix LinearLayer::backward(const Matrix& dy) {
  const Matrix& x = x_cache;
  gw = Matrix(w.rows(), w.cols());
  gb.assign(b.size(), 0.0);
  for (std::size_t t = 0; t < dy.rows(); ++t)
    for (std::size_t o = 0; o < w.rows(); ++o) {
      const double d = dy(t, o);
      gb[o] += d;
      for (std::size_t k = 0; k < w.cols(); ++k) gw(o, k) += d * x(t, k);
    }
  Matrix dx(x.rows(), x.cols());
  for (std::size_t t = 0; t < dy.rows(); ++t)
    for (std::size_t k = 0; k < w.cols(); ++k) {
      double acc = 0.0;
      for (std::size_t o = 0; o < w.rows(); ++o) acc += dy(t, o) * w(o, k);
      dx(t, k) = acc;
    }
  return dx;
}

void BatchNormLayer::init(int features) {
  const std::size_t f = static_cast<std::size_t>(features);
  scale.assign(f, 1.0);
  shift.assign(f, 0.0);
  gscale.assign(f, 0.0);
  gshift.assign(f, 0.0);
  run_mean.assign(f, 0.0);
  run_var.assign(f, 1.0);
}

Matrix BatchNormLayer::forward(const Matrix& x, bool train) {
  const std::size_t T = x.rows(), F = x.cols();
  if (F != scale.size()) throw std::invalid_argument("BatchNormLayer: shape mismatch");
  Matrix y(T, F);
  if (train) {
    xhat_cache = Matrix(T, F);
    invstd_cache.assign(F, 0.0);
    for (std::size_t f = 0; f < F; ++f) {
      double mean = 0.0;
      for (std::size_t t = 0; t < T; ++t) mean += x(t, f);
      mean /= static_cast<double>(T);
      double var = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        const double d = x(t, f) - mean;
        var += d * d;
      }
      var /= static_cast<double>(T);
      const double invstd = 1.0 / std::sqrt(var + eps);
      invstd_cache[f] = invstd;
      for (std::size_t t = 0; t < T; ++t) {
        const double xh = (x(t, f) - mean) * invstd;
        xhat_cache(t, f) = xh;
        y(t, f) = scale[f] * xh + shift[f];
      }
      run_mean[f] = (1.0 - momentum) * run_mean[f] + momentum * mean;
      run_var[f] = (1.0 - momentum) * run_var[f] + momentum * var;
    }
  } else {
    for (std::size_t f = 0; f < F; ++f) {
      const double invstd = 1.0 / std::sqrt(run_var[f] + eps);
      for (std::size_t t = 0; t < T; ++t)
        y(t, f) = scale[f] * (x(t, f) - run_mean[f]) * invstd + shift[f];
    }
  }
  return y;
}

Matrix BatchNormLayer::backward(const Matrix& dy) {
  const std::size_t T = dy.rows(), F = dy.cols();
  Matrix dx(T, F);
  gscale.assign(F, 0.0);
  gshift.assign(F, 0.0);
  for (std::size_t f = 0; f < F; ++f) {
    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double dxhat = dy(t, f) * scale[f];
      sum_dxhat += dxhat;
      sum_dxhat_xhat += dxhat * xhat_cache(t, f);
      gscale[f] += dy(t, f) * xhat_cache(t, f);
      gshift[f] += dy(t, f);
    }
    const double n = static_cast<double>(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double dxhat = dy(t, f) * scale[f];
      dx(t, f) = invstd_cache[f] / n *
                 (n * dxhat - sum_dxhat - xhat_cache(t, f) * sum_dxhat_xhat);
    }
  }
  return dx;
}

// ----------------------------------------------------------------- model

TcnnModel::TcnnModel(const TcnnShape& shape) : shape_(shape) {
  fc_target.init(TcnnShape::kTargetHidden, shape.target_in());
  fc_cond1.init(TcnnShape::kCondHidden1, shape.cond_in());
  bn1.init(TcnnShape::kCondHidden1);
  fc_cond2.init(TcnnShape::kCondHidden2, TcnnShape::kCondHidden1);
  bn2.init(TcnnShape::kCondHidden2);
  fc_out.init(shape.n_aps, shape.combiner_in());
}

void TcnnModel::init_weights(std::uint64_t seed) {
  Rng rng(seed);
  kaiming_uniform(fc_target.w, rng);
  kaiming_uniform(fc_cond1.w, rng);
  kaiming_uniform(fc_cond2.w, rng);
  kaiming_uniform(fc_out.w, rng);
}

Matrix TcnnModel::forward(const Matrix& x_target, const Matrix& x_cond, bool train) {
  if (x_target.rows() != x_cond.rows())
    throw std::invalid_argument("TcnnModel: batch size mismatch");
  // Target branch is plain affine; the condition branch is FC-BN-ReLU twice.
  const Matrix ut = fc_target.forward(x_target, train);
  const Matrix a1 = relu(bn1.forward(fc_cond1.forward(x_cond, train), train), relu1_mask_);
  const Matrix uc = relu(bn2.forward(fc_cond2.forward(a1, train), train), relu2_mask_);

  Matrix cat(x_target.rows(), static_cast<std::size_t>(shape_.combiner_in()));
  for (std::size_t t = 0; t < cat.rows(); ++t) {
    for (std::size_t k = 0; k < ut.cols(); ++k) cat(t, k) = ut(t, k);
    for (std::size_t k = 0; k < uc.cols(); ++k) cat(t, ut.cols() + k) = uc(t, k);
  }
  Matrix logits = fc_out.forward(cat, train);
  softmax_rows(logits);
  return logits;
}

void TcnnModel::backward(const Matrix& probs, const Matrix& labels_onehot) {
  const std::size_t T = probs.rows();
  Matrix dlogits(T, probs.cols());
  softmax_mse_backward_block(probs, labels_onehot, 0, probs.cols(),
                             2.0 / static_cast<double>(T), dlogits);

  const Matrix dcat = fc_out.backward(dlogits);
  const std::size_t th = static_cast<std::size_t>(TcnnShape::kTargetHidden);
  Matrix dut(T, th), duc(T, dcat.cols() - th);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < th; ++k) dut(t, k) = dcat(t, k);
    for (std::size_t k = th; k < dcat.cols(); ++k) duc(t, k - th) = dcat(t, k);
  }

  for (std::size_t k = 0; k < duc.data().size(); ++k)
    duc.data()[k] *= relu2_mask_.data()[k];
  Matrix da1 = fc_cond2.backward(bn2.backward(duc));
  for (std::size_t k = 0; k < da1.data().size(); ++k)
    da1.data()[k] *= relu1_mask_.data()[k];
  (void)fc_cond1.backward(bn1.backward(da1));
  (void)fc_target.backward(dut);
}

std::vector<std::pair<double*, std::size_t>> TcnnModel::parameters() {
  return {
      {fc_target.w.data().data(), fc_target.w.data().size()},
      {fc_target.b.data(), fc_target.b.size()},
      {fc_cond1.w.data().data(), fc_cond1.w.data().size()},
      {fc_cond1.b.data(), fc_cond1.b.size()},
      {bn1.scale.data(), bn1.scale.size()},
      {bn1.shift.data(), bn1.shift.size()},
      {fc_cond2.w.data().data(), fc_cond2.w.data().size()},
      {fc_cond2.b.data(), fc_cond2.b.size()},
      {bn2.scale.data(), bn2.scale.size()},
      {bn2.shift.data(), bn2.shift.size()},
      {fc_out.w.data().data(), fc_out.w.data().size()},
      {fc_out.b.data(), fc_out.b.size()},
  };
}

std::vector<std::pair<double*, std::size_t>> TcnnModel::gradients() {
  return {
      {fc_target.gw.data().data(), fc_target.gw.data().size()},
      {fc_target.gb.data(), fc_target.gb.size()},
      {fc_cond1.gw.data().data(), fc_cond1.gw.data().size()},
      {fc_cond1.gb.data(), fc_cond1.gb.size()},
      {bn1.gscale.data(), bn1.gscale.size()},
      {bn1.gshift.data(), bn1.gshift.size()},
      {fc_cond2.gw.data().data(), fc_cond2.gw.data().size()},
      {fc_cond2.gb.data(), fc_cond2.gb.size()},
      {bn2.gscale.data(), bn2.gscale.size()},
      {bn2.gshift.data(), bn2.gshift.size()},
      {fc_out.gw.data().data(), fc_out.gw.data().size()},
      {fc_out.gb.data(), fc_out.gb.size()},
  };
}

double mse_loss(const Matrix& probs, const Matrix& labels_onehot) {
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.data().size(); ++k) {
    const double d = labels_onehot.data()[k] - probs.data()[k];
    acc += d * d;
  }
  return acc / static_cast<double>(probs.rows());
}

void adam_step(std::vector<std::pair<double*, std::size_t>> params,
               std::vector<std::pair<double*, std::size_t>> grads, AdamState& state,
               const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: mismatch");
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
      state.m[k].assign(params[k].second, 0.0);
      state.v[k].assign(params[k].second, 0.0);
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* p = params[k].first;
    const double* g = grads[k].first;
    for (std::size_t i = 0; i < params[k].second; ++i) {
      state.m[k][i] = cfg.beta1 * state.m[k][i] + (1.0 - cfg.beta1) * g[i];
      state.v[k][i] = cfg.beta2 * state.v[k][i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = state.m[k][i] / bc1;
      const double vhat = state.v[k][i] / bc2;
      p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

// --------------------------------------------------------------- mapping

MappedInstance adaptive_map(const Matrix& snr_db, const std::vector<double>& rate_bps,
                            int mapped_users) {
  const int nu = static_cast<int>(rate_bps.size());
  if (nu == 0) throw std::invalid_argument("adaptive_map: no users");
  if (nu > mapped_users)
    throw std::invalid_argument("adaptive_map: user count exceeds M (mapping infeasible)");
  if (snr_db.cols() != static_cast<std::size_t>(nu))
    throw std::invalid_argument("adaptive_map: shape mismatch");

  const int a = mapped_users / nu;
  const int b = mapped_users % nu;

  MappedInstance mi;
  mi.copies.resize(nu);
  for (int j = 0; j < nu; ++j) mi.copies[j] = (j < b) ? a + 1 : a;

  mi.snr_db = Matrix(snr_db.rows(), static_cast<std::size_t>(mapped_users));
  mi.rate_bps.resize(mapped_users);
  mi.origin.resize(mapped_users);
  for (int m = 0; m < mapped_users; ++m) {
    const int j = (m < nu) ? m : (m % nu);
    mi.origin[m] = j;
    mi.rate_bps[m] = rate_bps[j] / static_cast<double>(mi.copies[j]);
    for (std::size_t i = 0; i < snr_db.rows(); ++i)
      mi.snr_db(i, static_cast<std::size_t>(m)) = snr_db(i, static_cast<std::size_t>(j));
  }
  return mi;
}

std::vector<double> mapped_features(const MappedInstance& mi,
                                    const NormalizationSpec& norm) {
  const std::size_t na = mi.snr_db.rows();
  std::vector<double> out(mi.rate_bps.size() * (na + 1));
  for (std::size_t m = 0; m < mi.rate_bps.size(); ++m) {
    double* block = out.data() + m * (na + 1);
    for (std::size_t i = 0; i < na; ++i)
      block[i] = normalize_snr_db(mi.snr_db(i, m), norm, i);
    block[na] = normalize_rate_bps(mi.rate_bps[m], norm);
  }
  return out;
}

// -------------------------------------------------------------- training

namespace {

struct PreparedSample {
  std::vector<double> cond;  // M*(n_aps+1) normalized features
  std::vector<int> origin;   // mapped index -> original user
  std::vector<std::uint16_t> labels;  // per original user
  int n_users = 0;
};

PreparedSample prepare(const RawSample& s, const NormalizationSpec& norm, int m) {
  const MappedInstance mi = adaptive_map(s.snr_db, s.requirements_bps, m);
  PreparedSample p;
  p.cond = mapped_features(mi, norm);
  p.origin = mi.origin;
  p.labels = s.labels;
  p.n_users = static_cast<int>(s.requirements_bps.size());
  return p;
}

void fill_example(const PreparedSample& p, int target_mapped, const TcnnShape& shape,
                  std::size_t row, Matrix& xt, Matrix& xc, Matrix& y) {
  const std::size_t fin = static_cast<std::size_t>(shape.target_in());
  const double* block = p.cond.data() + static_cast<std::size_t>(target_mapped) * fin;
  for (std::size_t k = 0; k < fin; ++k) xt(row, k) = block[k];
  for (std::size_t k = 0; k < p.cond.size(); ++k) xc(row, k) = p.cond[k];
  const int label = p.labels[static_cast<std::size_t>(p.origin[target_mapped])];
  for (std::size_t i = 0; i < y.cols(); ++i) y(row, i) = 0.0;
  y(row, static_cast<std::size_t>(label)) = 1.0;
}

std::pair<double, double> evaluate_prepared(TcnnModel& model,
                                            const std::vector<PreparedSample>& set) {
  const TcnnShape& shape = model.shape();
  double loss_sum = 0.0;
  std::size_t n_targets = 0, hits = 0;
  for (const PreparedSample& p : set) {
    const std::size_t nu = static_cast<std::size_t>(p.n_users);
    Matrix xt(nu, static_cast<std::size_t>(shape.target_in()));
    Matrix xc(nu, static_cast<std::size_t>(shape.cond_in()));
    Matrix y(nu, static_cast<std::size_t>(shape.n_aps));
    // Target for original user j is its first mapped copy, index j.
    for (std::size_t j = 0; j < nu; ++j)
      fill_example(p, static_cast<int>(j), shape, j, xt, xc, y);
    const Matrix probs = model.forward(xt, xc, /*train=*/false);
    loss_sum += mse_loss(probs, y) * static_cast<double>(nu);
    for (std::size_t j = 0; j < nu; ++j) {
      std::size_t arg = 0;
      for (std::size_t i = 1; i < probs.cols(); ++i)
        if (probs(j, i) > probs(j, arg)) arg = i;
      if (arg == p.labels[j]) ++hits;
    }
    n_targets += nu;
  }
  if (n_targets == 0) return {0.0, 0.0};
  return {loss_sum / static_cast<double>(n_targets),
          static_cast<double>(hits) / static_cast<double>(n_targets)};
}

}  // namespace

TrainResult train(const Dataset& train_set, const Dataset& test_set,
                  const TcnnShape& shape, const TrainConfig& cfg) {
  if (train_set.samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (train_set.n_aps != shape.n_aps)
    throw std::invalid_argument("train: dataset/model AP count mismatch");

  const NormalizationSpec& norm = train_set.norm;
  std::vector<PreparedSample> tr, te;
  tr.reserve(train_set.samples.size());
  for (const RawSample& s : train_set.samples)
    tr.push_back(prepare(s, norm, shape.max_users));
  te.reserve(test_set.samples.size());
  for (const RawSample& s : test_set.samples)
    te.push_back(prepare(s, norm, shape.max_users));

  TrainResult res;
  res.model = TcnnModel(shape);
  res.model.init_weights(derive_seed(cfg.seed, 0));
  AdamState adam;

  std::vector<std::size_t> order(tr.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_int_distribution<int> pick_target(0, shape.max_users - 1);

    // (sample, target) pairs for this pass.
    std::vector<std::pair<std::size_t, int>> examples;
    for (std::size_t s : order) {
      if (cfg.all_targets) {
        for (int m = 0; m < shape.max_users; ++m) examples.push_back({s, m});
      } else {
        examples.push_back({s, pick_target(rng)});
      }
    }

    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < examples.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t T =
          std::min<std::size_t>(cfg.batch_size, examples.size() - start);
      Matrix xt(T, static_cast<std::size_t>(shape.target_in()));
      Matrix xc(T, static_cast<std::size_t>(shape.cond_in()));
      Matrix y(T, static_cast<std::size_t>(shape.n_aps));
      for (std::size_t r = 0; r < T; ++r) {
        const auto& [s, m] = examples[start + r];
        fill_example(tr[s], m, shape, r, xt, xc, y);
      }
      const Matrix probs = res.model.forward(xt, xc, /*train=*/true);
      const double loss = mse_loss(probs, y);
      if (!std::isfinite(loss))
        throw std::runtime_error("train: non-finite loss at epoch " +
                                 std::to_string(epoch));
      loss_sum += loss;
      ++n_batches;
      res.model.backward(probs, y);
      adam_step(res.model.parameters(), res.model.gradients(), adam, cfg.adam);
    }

    EpochStats st;
    st.epoch = epoch;
    st.train_loss = loss_sum / static_cast<double>(n_batches);
    const auto [tl, acc] = evaluate_prepared(res.model, te);
    st.test_loss = tl;
    st.test_accuracy = acc;
    res.history.push_back(st);
    res.epochs_run = epoch + 1;
  }
  return res;
}

Matrix predict_assignment(TcnnModel& model, const NormalizationSpec& norm,
                          const Matrix& snr_db, const std::vector<double>& rate_bps) {
  const TcnnShape& shape = model.shape();
  const MappedInstance mi = adaptive_map(snr_db, rate_bps, shape.max_users);
  const std::vector<double> cond = mapped_features(mi, norm);
  const std::size_t nu = rate_bps.size();
  const std::size_t fin = static_cast<std::size_t>(shape.target_in());

  // The condition vector is the same for every target user, so its branch
  // is evaluated once and broadcast; per-target cost is the small target
  // branch plus the combiner. Identical outputs to the batched forward.
  Matrix xc(1, cond.size());
  for (std::size_t k = 0; k < cond.size(); ++k) xc(0, k) = cond[k];
  Matrix relu_mask;
  const Matrix a1 =
      relu(model.bn1.forward(model.fc_cond1.forward(xc, false), false), relu_mask);
  const Matrix uc =
      relu(model.bn2.forward(model.fc_cond2.forward(a1, false), false), relu_mask);

  Matrix xt(nu, fin);
  for (std::size_t j = 0; j < nu; ++j) {
    // Mapped copy j has origin j for every j < N_u.
    const double* block = cond.data() + j * fin;
    for (std::size_t k = 0; k < fin; ++k) xt(j, k) = block[k];
  }
  const Matrix ut = model.fc_target.forward(xt, false);
  Matrix cat(nu, static_cast<std::size_t>(shape.combiner_in()));
  for (std::size_t j = 0; j < nu; ++j) {
    for (std::size_t k = 0; k < ut.cols(); ++k) cat(j, k) = ut(j, k);
    for (std::size_t k = 0; k < uc.cols(); ++k) cat(j, ut.cols() + k) = uc(0, k);
  }
  Matrix probs = model.fc_out.forward(cat, false);
  softmax_rows(probs);
  std::vector<int> ap(nu, 0);
  for (std::size_t j = 0; j < nu; ++j) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < probs.cols(); ++i)
      if (probs(j, i) > probs(j, arg)) arg = i;
    ap[j] = static_cast<int>(arg);
  }
  return chi_from_labels(ap, static_cast<std::size_t>(shape.n_aps));
}

std::pair<double, double> evaluate_model(TcnnModel& model, const Dataset& set) {
  std::vector<PreparedSample> prep;
  prep.reserve(set.samples.size());
  for (const RawSample& s : set.samples)
    prep.push_back(prepare(s, set.norm, model.shape().max_users));
  return evaluate_prepared(model, prep);
}

// ------------------------------------------------------------ checkpoint

namespace {

constexpr char kCkptMagic[8] = {'H', 'L', 'W', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kCkptVersion = 1;

void write_vec(std::ostream& os, const std::vector<double>& v, std::uint64_t& h) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
  h = fnv1a_bytes(v.data(), v.size() * sizeof(double), h);
}

void read_vec(std::istream& is, std::vector<double>& v, std::uint64_t& h) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  h = fnv1a_bytes(v.data(), v.size() * sizeof(double), h);
}

}  // namespace

void save_checkpoint(const TcnnModel& model, const NormalizationSpec& norm,
                     std::uint64_t seed, int epoch, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint save: cannot open " + path);
  os.write(kCkptMagic, sizeof(kCkptMagic));
  const std::uint32_t ver = kCkptVersion;
  os.write(reinterpret_cast<const char*>(&ver), sizeof(ver));
  const std::int32_t na = model.shape().n_aps, m = model.shape().max_users,
                     ep = epoch;
  os.write(reinterpret_cast<const char*>(&na), sizeof(na));
  os.write(reinterpret_cast<const char*>(&m), sizeof(m));
  os.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
  os.write(reinterpret_cast<const char*>(&ep), sizeof(ep));
  const double nf[8] = {norm.snr_min_db, norm.snr_max_db, norm.wifi_min_db,
                        norm.wifi_max_db, norm.lifi_min_db, norm.lifi_max_db,
                        norm.rate_min_bps, norm.rate_max_bps};
  os.write(reinterpret_cast<const char*>(nf), sizeof(nf));
  const std::uint8_t pk = norm.per_kind ? 1 : 0;
  os.write(reinterpret_cast<const char*>(&pk), sizeof(pk));

  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto& mm = const_cast<TcnnModel&>(model);
  for (const auto& [ptr, n] : mm.parameters()) {
    os.write(reinterpret_cast<const char*>(ptr),
             static_cast<std::streamsize>(n * sizeof(double)));
    h = fnv1a_bytes(ptr, n * sizeof(double), h);
  }
  for (const auto* bn : {&model.bn1, &model.bn2}) {
    std::vector<double> rm = bn->run_mean, rv = bn->run_var;
    write_vec(os, rm, h);
    write_vec(os, rv, h);
  }
  os.write(reinterpret_cast<const char*>(&h), sizeof(h));
  if (!os) throw std::runtime_error("checkpoint save: write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint load: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCkptMagic, sizeof(magic)) != 0)
    throw std::runtime_error("checkpoint load: bad magic");
  std::uint32_t ver = 0;
  is.read(reinterpret_cast<char*>(&ver), sizeof(ver));
  if (ver != kCkptVersion) throw std::runtime_error("checkpoint load: version mismatch");

  std::int32_t na = 0, m = 0, ep = 0;
  std::uint64_t seed = 0;
  is.read(reinterpret_cast<char*>(&na), sizeof(na));
  is.read(reinterpret_cast<char*>(&m), sizeof(m));
  is.read(reinterpret_cast<char*>(&seed), sizeof(seed));
  is.read(reinterpret_cast<char*>(&ep), sizeof(ep));
  double nf[8];
  is.read(reinterpret_cast<char*>(nf), sizeof(nf));
  std::uint8_t pk = 0;
  is.read(reinterpret_cast<char*>(&pk), sizeof(pk));
  if (!is) throw std::runtime_error("checkpoint load: truncated header");

  Checkpoint ck;
  ck.seed = seed;
  ck.epoch = ep;
  ck.norm.snr_min_db = nf[0];
  ck.norm.snr_max_db = nf[1];
  ck.norm.wifi_min_db = nf[2];
  ck.norm.wifi_max_db = nf[3];
  ck.norm.lifi_min_db = nf[4];
  ck.norm.lifi_max_db = nf[5];
  ck.norm.rate_min_bps = nf[6];
  ck.norm.rate_max_bps = nf[7];
  ck.norm.per_kind = pk != 0;

  TcnnShape shape;
  shape.n_aps = na;
  shape.max_users = m;
  ck.model = TcnnModel(shape);

  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [ptr, n] : ck.model.parameters()) {
    is.read(reinterpret_cast<char*>(ptr),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw std::runtime_error("checkpoint load: truncated tensors");
    h = fnv1a_bytes(ptr, n * sizeof(double), h);
  }
  for (auto* bn : {&ck.model.bn1, &ck.model.bn2}) {
    read_vec(is, bn->run_mean, h);
    read_vec(is, bn->run_var, h);
  }
  std::uint64_t stored = 0;
  is.read(reinterpret_cast<char*>(&stored), sizeof(stored));
  if (!is || stored != h) throw std::runtime_error("checkpoint load: digest mismatch");
  return ck;
}

// ------------------------------------------------------------- DNN baseline

DnnModel::DnnModel(const TcnnShape& shape) : shape_(shape) {
  fc1.init(TcnnShape::kCondHidden1, shape.cond_in());
  bn1.init(TcnnShape::kCondHidden1);
  fc2.init(shape.max_users * shape.n_aps, TcnnShape::kCondHidden1);
}

void DnnModel::init_weights(std::uint64_t seed) {
  Rng rng(seed);
  kaiming_uniform(fc1.w, rng);
  kaiming_uniform(fc2.w, rng);
}

Matrix DnnModel::forward(const Matrix& x_cond, bool train) {
  const Matrix a1 = relu(bn1.forward(fc1.forward(x_cond, train), train), relu_mask_);
  Matrix logits = fc2.forward(a1, train);
  const std::size_t na = static_cast<std::size_t>(shape_.n_aps);
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    for (int u = 0; u < shape_.max_users; ++u) {
      const std::size_t c0 = static_cast<std::size_t>(u) * na;
      double mx = logits(t, c0);
      for (std::size_t i = 1; i < na; ++i) mx = std::max(mx, logits(t, c0 + i));
      double sum = 0.0;
      for (std::size_t i = 0; i < na; ++i) {
        logits(t, c0 + i) = std::exp(logits(t, c0 + i) - mx);
        sum += logits(t, c0 + i);
      }
      for (std::size_t i = 0; i < na; ++i) logits(t, c0 + i) /= sum;
    }
  }
  return logits;
}

void DnnModel::backward(const Matrix& probs, const Matrix& labels_onehot) {
  const std::size_t T = probs.rows();
  const std::size_t na = static_cast<std::size_t>(shape_.n_aps);
  Matrix dlogits(T, probs.cols());
  for (int u = 0; u < shape_.max_users; ++u)
    softmax_mse_backward_block(probs, labels_onehot, static_cast<std::size_t>(u) * na,
                               na, 2.0 / static_cast<double>(T), dlogits);
  Matrix da1 = fc2.backward(dlogits);
  for (std::size_t k = 0; k < da1.data().size(); ++k)
    da1.data()[k] *= relu_mask_.data()[k];
  (void)fc1.backward(bn1.backward(da1));
}

std::vector<std::pair<double*, std::size_t>> DnnModel::parameters() {
  return {
      {fc1.w.data().data(), fc1.w.data().size()},
      {fc1.b.data(), fc1.b.size()},
      {bn1.scale.data(), bn1.scale.size()},
      {bn1.shift.data(), bn1.shift.size()},
      {fc2.w.data().data(), fc2.w.data().size()},
      {fc2.b.data(), fc2.b.size()},
  };
}

std::vector<std::pair<double*, std::size_t>> DnnModel::gradients() {
  return {
      {fc1.gw.data().data(), fc1.gw.data().size()},
      {fc1.gb.data(), fc1.gb.size()},
      {bn1.gscale.data(), bn1.gscale.size()},
      {bn1.gshift.data(), bn1.gshift.size()},
      {fc2.gw.data().data(), fc2.gw.data().size()},
      {fc2.gb.data(), fc2.gb.size()},
  };
}

}  // namespace hlwnet
