#include "tnloss/model.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace tnloss {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[6] = {'T', 'N', 'L', 'P', '1', '\n'};

size_t param_count(const std::vector<int>& dims) {
  size_t n = 0;
  for (size_t l = 0; l + 1 < dims.size(); ++l)
    n += static_cast<size_t>(dims[l + 1]) * static_cast<size_t>(dims[l]) +
         static_cast<size_t>(dims[l + 1]);
  return n;
}

}  // namespace

MlpPredicateGroup::MlpPredicateGroup(std::vector<int> layer_dims,
                                     std::vector<std::string> head_names)
    : dims_(std::move(layer_dims)), heads_(std::move(head_names)) {
  if (dims_.size() < 2) throw std::invalid_argument("model needs input and output dims");
  for (int d : dims_)
    if (d < 1) throw std::invalid_argument("layer dims must be positive");
  if (static_cast<int>(heads_.size()) != dims_.back())
    throw std::invalid_argument("one head name per output unit required");
  params_.assign(param_count(dims_), 0.0);
}

void MlpPredicateGroup::init_params(unsigned seed) {
  std::mt19937_64 rng(seed);
  size_t off = 0;
  for (int l = 0; l < layer_count(); ++l) {
    const int in = dims_[static_cast<size_t>(l)];
    const int out = dims_[static_cast<size_t>(l) + 1];
    std::normal_distribution<double> he(0.0, std::sqrt(2.0 / in));
    for (int k = 0; k < out * in; ++k) params_[off + static_cast<size_t>(k)] = he(rng);
    off += static_cast<size_t>(out) * in;
    for (int k = 0; k < out; ++k) params_[off + static_cast<size_t>(k)] = 0.0;
    off += static_cast<size_t>(out);
  }
}

int MlpPredicateGroup::head_index(const std::string& name) const {
  for (size_t i = 0; i < heads_.size(); ++i)
    if (heads_[i] == name) return static_cast<int>(i);
  return -1;
}

const Eigen::MatrixXd& MlpPredicateGroup::forward(const SparseFeatures& X,
                                                  Workspace& ws) const {
  const int L = layer_count();
  ws.z.resize(static_cast<size_t>(L));
  ws.h.resize(static_cast<size_t>(L));
  size_t off = 0;
  for (int l = 0; l < L; ++l) {
    const int in = dims_[static_cast<size_t>(l)];
    const int out = dims_[static_cast<size_t>(l) + 1];
    Eigen::Map<const Eigen::MatrixXd> W(params_.data() + off, out, in);
    off += static_cast<size_t>(out) * in;
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + off, out);
    off += static_cast<size_t>(out);
    Eigen::MatrixXd& Z = ws.z[static_cast<size_t>(l)];
    if (l == 0)
      Z = X * W.transpose();
    else
      Z = ws.h[static_cast<size_t>(l) - 1] * W.transpose();
    Z.rowwise() += b.transpose();
    Eigen::MatrixXd& H = ws.h[static_cast<size_t>(l)];
    if (l + 1 < L) {
      H = Z.cwiseMax(0.0);
    } else {
      // Row-wise softmax, shifted for stability.
      H = (Z.colwise() - Z.rowwise().maxCoeff()).array().exp();
      H.array().colwise() /= H.rowwise().sum().array();
    }
  }
  return ws.h.back();
}

std::vector<double> MlpPredicateGroup::backward(const SparseFeatures& X,
                                                const Workspace& ws,
                                                const Eigen::MatrixXd& dY) const {
  const int L = layer_count();
  std::vector<double> grad(params_.size(), 0.0);

  // Softmax Jacobian: dz_j = y_j * (dy_j - sum_k dy_k y_k), per row.
  const Eigen::MatrixXd& Y = ws.h.back();
  Eigen::VectorXd rowdot = (dY.array() * Y.array()).rowwise().sum();
  Eigen::MatrixXd dZ = Y.array() * (dY.colwise() - rowdot).array();

  // Per-layer parameter offsets.
  std::vector<size_t> offs(static_cast<size_t>(L));
  size_t off = 0;
  for (int l = 0; l < L; ++l) {
    offs[static_cast<size_t>(l)] = off;
    off += static_cast<size_t>(dims_[static_cast<size_t>(l) + 1]) *
               dims_[static_cast<size_t>(l)] +
           static_cast<size_t>(dims_[static_cast<size_t>(l) + 1]);
  }

  for (int l = L - 1; l >= 0; --l) {
    const int in = dims_[static_cast<size_t>(l)];
    const int out = dims_[static_cast<size_t>(l) + 1];
    Eigen::Map<Eigen::MatrixXd> gW(grad.data() + offs[static_cast<size_t>(l)], out, in);
    Eigen::Map<Eigen::VectorXd> gb(
        grad.data() + offs[static_cast<size_t>(l)] + static_cast<size_t>(out) * in, out);
    if (l == 0) {
      gW = (SparseFeatures(X.transpose()) * dZ).transpose();
    } else {
      gW = dZ.transpose() * ws.h[static_cast<size_t>(l) - 1];
    }
    gb = dZ.colwise().sum();
    if (l > 0) {
      Eigen::Map<const Eigen::MatrixXd> W(params_.data() + offs[static_cast<size_t>(l)],
                                          out, in);
      Eigen::MatrixXd dH = dZ * W;
      dZ = ((ws.z[static_cast<size_t>(l) - 1].array() > 0.0).cast<double>() * dH.array())
               .matrix();
    }
  }
  return grad;
}

void MlpPredicateGroup::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.write(kMagic, sizeof(kMagic));
  const uint32_t nd = static_cast<uint32_t>(dims_.size());
  os.write(reinterpret_cast<const char*>(&nd), sizeof(nd));
  for (int d : dims_) {
    const int32_t v = d;
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  const uint32_t nh = static_cast<uint32_t>(heads_.size());
  os.write(reinterpret_cast<const char*>(&nh), sizeof(nh));
  for (const std::string& h : heads_) {
    const uint32_t len = static_cast<uint32_t>(h.size());
    os.write(reinterpret_cast<const char*>(&len), sizeof(len));
    os.write(h.data(), static_cast<std::streamsize>(h.size()));
  }
  os.write(reinterpret_cast<const char*>(params_.data()),
           static_cast<std::streamsize>(params_.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write to '" + path + "'");
}

MlpPredicateGroup MlpPredicateGroup::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  char magic[sizeof(kMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("'" + path + "' is not a model checkpoint");
  uint32_t nd = 0;
  is.read(reinterpret_cast<char*>(&nd), sizeof(nd));
  if (!is || nd < 2 || nd > 64) throw std::runtime_error("corrupt checkpoint: layer count");
  std::vector<int> dims(nd);
  for (uint32_t i = 0; i < nd; ++i) {
    int32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is || v < 1) throw std::runtime_error("corrupt checkpoint: dims");
    dims[i] = v;
  }
  uint32_t nh = 0;
  is.read(reinterpret_cast<char*>(&nh), sizeof(nh));
  if (!is || nh != static_cast<uint32_t>(dims.back()))
    throw std::runtime_error("corrupt checkpoint: head count");
  std::vector<std::string> heads(nh);
  for (uint32_t i = 0; i < nh; ++i) {
    uint32_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!is || len > 4096) throw std::runtime_error("corrupt checkpoint: head name");
    heads[i].resize(len);
    is.read(heads[i].data(), len);
  }
  MlpPredicateGroup m(std::move(dims), std::move(heads));
  is.read(reinterpret_cast<char*>(m.params_.data()),
          static_cast<std::streamsize>(m.params_.size() * sizeof(double)));
  if (!is || is.gcount() != static_cast<std::streamsize>(m.params_.size() * sizeof(double)))
    throw std::runtime_error("corrupt checkpoint: parameter payload");
  return m;
}

}  // namespace tnloss
