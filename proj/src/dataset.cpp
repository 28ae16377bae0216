#include "hlwnet/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hlwnet/balancers.hpp"
#include "hlwnet/rng.hpp"

namespace hlwnet {

namespace {

constexpr char kMagic[8] = {'H', 'L', 'W', 'D', 'S', 'E', 'T', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304u;

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
std::uint64_t fnv1a_value(T v, std::uint64_t h) {
  return fnv1a(&v, sizeof(v), h);
}

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("dataset load: truncated file");
}

struct HeaderBlob {
  char magic[8];
  std::uint32_t version;
  std::uint32_t endian;
  std::uint16_t n_aps;
  std::uint16_t mapped_users;
  std::uint8_t per_kind;
  std::uint8_t pad[3];
  double snr_min, snr_max;
  double wifi_min, wifi_max;
  double lifi_min, lifi_max;
  double rate_min, rate_max;
  std::uint64_t seed;
  std::uint64_t digest;
  std::uint64_t sample_count;
};

}  // namespace

std::uint64_t config_digest(const GenerateConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int c : cfg.user_counts) h = fnv1a_value(c, h);
  h = fnv1a_value(cfg.batches, h);
  h = fnv1a_value(cfg.batch_size, h);
  h = fnv1a_value(cfg.mapped_users, h);
  h = fnv1a_value(cfg.sim.room.side_length, h);
  h = fnv1a_value(cfg.sim.room.ceiling_height, h);
  h = fnv1a_value(cfg.sim.room.lifi_grid, h);
  h = fnv1a_value(cfg.sim.rates.shape, h);
  h = fnv1a_value(cfg.sim.rates.scale_bps, h);
  h = fnv1a_value(cfg.sim.lifi.optical_power_w, h);
  h = fnv1a_value(cfg.sim.wifi.tx_power_dbm, h);
  return h;
}

Dataset generate(const GenerateConfig& cfg, std::uint64_t master_seed, bool parallel) {
  if (cfg.user_counts.empty()) throw std::invalid_argument("generate: no user counts");
  for (int c : cfg.user_counts)
    if (c < 1 || c > cfg.mapped_users)
      throw std::invalid_argument("generate: user count must be in [1, M]");
  if (cfg.batches < 1 || cfg.batch_size < 1)
    throw std::invalid_argument("generate: batches and batch size must be >= 1");

  const std::size_t total =
      static_cast<std::size_t>(cfg.batches) * static_cast<std::size_t>(cfg.batch_size);
  const FuzzyRuleTable table(cfg.sim.rates.mean_bps() / 1e6);

  Dataset ds;
  ds.n_aps = static_cast<std::uint16_t>(cfg.sim.room.lifi_grid * cfg.sim.room.lifi_grid + 1);
  ds.mapped_users = static_cast<std::uint16_t>(cfg.mapped_users);
  ds.seed = master_seed;
  ds.config_digest = config_digest(cfg);
  ds.samples.resize(total);

  const std::size_t k = cfg.user_counts.size();
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (long long s = 0; s < static_cast<long long>(total); ++s) {
    const std::size_t idx = static_cast<std::size_t>(s);
    const int n_users = cfg.user_counts[idx * k / total];
    const Snapshot snap =
        build_snapshot_uniform(cfg.sim, n_users, derive_seed(master_seed, idx));
    const auto labels = labels_from_chi(flopt_assign(snap, table));

    RawSample& out = ds.samples[idx];
    out.snr_db = snr_to_db(snap.snr);
    out.requirements_bps = snap.requirements();
    out.labels.resize(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j)
      out.labels[j] = static_cast<std::uint16_t>(labels[j]);
  }

  ds.norm = compute_norm_spec(ds);
  return ds;
}

Dataset generate_serial(const GenerateConfig& cfg, std::uint64_t master_seed) {
  return generate(cfg, master_seed, /*parallel=*/false);
}

NormalizationSpec compute_norm_spec(const Dataset& train, bool per_kind) {
  NormalizationSpec spec;
  spec.per_kind = per_kind;
  double gmin = 1e300, gmax = -1e300;
  double wmin = 1e300, wmax = -1e300;
  double lmin = 1e300, lmax = -1e300;
  for (const RawSample& s : train.samples) {
    for (std::size_t i = 0; i < s.snr_db.rows(); ++i) {
      for (std::size_t j = 0; j < s.snr_db.cols(); ++j) {
        const double v = s.snr_db(i, j);
        gmin = std::min(gmin, v);
        gmax = std::max(gmax, v);
        if (i == 0) {
          wmin = std::min(wmin, v);
          wmax = std::max(wmax, v);
        } else {
          lmin = std::min(lmin, v);
          lmax = std::max(lmax, v);
        }
      }
    }
  }
  if (train.samples.empty() || gmax <= gmin)
    throw std::invalid_argument("compute_norm_spec: degenerate training set");
  spec.snr_min_db = gmin;
  spec.snr_max_db = gmax;
  spec.wifi_min_db = wmin;
  spec.wifi_max_db = wmax;
  spec.lifi_min_db = lmin;
  spec.lifi_max_db = lmax;
  return spec;
}

double normalize_snr_db(double snr_db, const NormalizationSpec& spec, std::size_t row,
                        std::size_t* clamp_count) {
  double lo = spec.snr_min_db, hi = spec.snr_max_db;
  if (spec.per_kind) {
    lo = (row == 0) ? spec.wifi_min_db : spec.lifi_min_db;
    hi = (row == 0) ? spec.wifi_max_db : spec.lifi_max_db;
  }
  const double t = (snr_db - lo) / (hi - lo);
  if ((t < 0.0 || t > 1.0) && clamp_count) ++*clamp_count;
  return std::clamp(t, 0.0, 1.0);
}

double normalize_rate_bps(double rate_bps, const NormalizationSpec& spec,
                          std::size_t* clamp_count) {
  const double t = std::log10(std::max(rate_bps, 1e-300) / spec.rate_min_bps) /
                   std::log10(spec.rate_max_bps / spec.rate_min_bps);
  if ((t < 0.0 || t > 1.0) && clamp_count) ++*clamp_count;
  return std::clamp(t, 0.0, 1.0);
}

void save(const Dataset& ds, const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "dataset format is little-endian");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("dataset save: cannot open " + path);

  HeaderBlob h{};
  std::memcpy(h.magic, kMagic, sizeof(kMagic));
  h.version = kVersion;
  h.endian = kEndianTag;
  h.n_aps = ds.n_aps;
  h.mapped_users = ds.mapped_users;
  h.per_kind = ds.norm.per_kind ? 1 : 0;
  h.snr_min = ds.norm.snr_min_db;
  h.snr_max = ds.norm.snr_max_db;
  h.wifi_min = ds.norm.wifi_min_db;
  h.wifi_max = ds.norm.wifi_max_db;
  h.lifi_min = ds.norm.lifi_min_db;
  h.lifi_max = ds.norm.lifi_max_db;
  h.rate_min = ds.norm.rate_min_bps;
  h.rate_max = ds.norm.rate_max_bps;
  h.seed = ds.seed;
  h.digest = ds.config_digest;
  h.sample_count = ds.samples.size();
  write_pod(os, h);
  write_pod(os, fnv1a(&h, sizeof(h)));

  for (const RawSample& s : ds.samples) {
    const std::uint32_t nu = static_cast<std::uint32_t>(s.snr_db.cols());
    write_pod(os, nu);
    os.write(reinterpret_cast<const char*>(s.snr_db.data().data()),
             static_cast<std::streamsize>(s.snr_db.data().size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(s.requirements_bps.data()),
             static_cast<std::streamsize>(nu * sizeof(double)));
    os.write(reinterpret_cast<const char*>(s.labels.data()),
             static_cast<std::streamsize>(nu * sizeof(std::uint16_t)));
  }
  if (!os) throw std::runtime_error("dataset save: write failed");
}

Dataset load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("dataset load: cannot open " + path);

  HeaderBlob h{};
  read_pod(is, h);
  std::uint64_t checksum = 0;
  read_pod(is, checksum);
  if (std::memcmp(h.magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("dataset load: bad magic");
  if (h.version != kVersion) throw std::runtime_error("dataset load: version mismatch");
  if (h.endian != kEndianTag) throw std::runtime_error("dataset load: endianness mismatch");
  if (checksum != fnv1a(&h, sizeof(h)))
    throw std::runtime_error("dataset load: header digest mismatch");

  Dataset ds;
  ds.n_aps = h.n_aps;
  ds.mapped_users = h.mapped_users;
  ds.seed = h.seed;
  ds.config_digest = h.digest;
  ds.norm.per_kind = h.per_kind != 0;
  ds.norm.snr_min_db = h.snr_min;
  ds.norm.snr_max_db = h.snr_max;
  ds.norm.wifi_min_db = h.wifi_min;
  ds.norm.wifi_max_db = h.wifi_max;
  ds.norm.lifi_min_db = h.lifi_min;
  ds.norm.lifi_max_db = h.lifi_max;
  ds.norm.rate_min_bps = h.rate_min;
  ds.norm.rate_max_bps = h.rate_max;

  ds.samples.resize(h.sample_count);
  for (RawSample& s : ds.samples) {
    std::uint32_t nu = 0;
    read_pod(is, nu);
    s.snr_db = Matrix(h.n_aps, nu);
    is.read(reinterpret_cast<char*>(s.snr_db.data().data()),
            static_cast<std::streamsize>(s.snr_db.data().size() * sizeof(double)));
    s.requirements_bps.resize(nu);
    is.read(reinterpret_cast<char*>(s.requirements_bps.data()),
            static_cast<std::streamsize>(nu * sizeof(double)));
    s.labels.resize(nu);
    is.read(reinterpret_cast<char*>(s.labels.data()),
            static_cast<std::streamsize>(nu * sizeof(std::uint16_t)));
    if (!is) throw std::runtime_error("dataset load: truncated file");
    for (std::uint16_t l : s.labels)
      if (l >= h.n_aps) throw std::runtime_error("dataset load: label out of range");
  }
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t rng_seed) {
  if (test_fraction <= 0.0 || test_fraction >= 1.0)
    throw std::invalid_argument("split: fraction must be in (0, 1)");
  std::vector<std::size_t> idx(ds.samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(rng_seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  const std::size_t n_test =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
  Dataset train = ds, test = ds;
  train.samples.clear();
  test.samples.clear();
  for (std::size_t k = 0; k < idx.size(); ++k)
    (k < n_test ? test : train).samples.push_back(ds.samples[idx[k]]);

  train.norm = compute_norm_spec(train, ds.norm.per_kind);
  test.norm = train.norm;  // test is always scored with train-split bounds
  return {std::move(train), std::move(test)};
}

}  // namespace hlwnet
