#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "wildgan/rng.hpp"
#include "wildgan/tensor.hpp"

namespace wildgan::nn {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using CMatMap = Eigen::Map<const RowMat<T>>;

template <typename T>
MatMap<T> as_mat(Tensor<T>& t, int64_t rows, int64_t cols) {
  return MatMap<T>(t.data.data(), rows, cols);
}
template <typename T>
CMatMap<T> as_mat(const Tensor<T>& t, int64_t rows, int64_t cols) {
  return CMatMap<T>(t.data.data(), rows, cols);
}

// Trainable tensor with its gradient accumulator.
template <typename T>
struct Param {
  Tensor<T> value;
  Tensor<T> grad;

  void init(std::vector<int> shape) {
    value = Tensor<T>(shape);
    grad = Tensor<T>(std::move(shape));
  }
  void zero_grad() { grad.fill(T(0)); }
};

template <typename T>
struct ParamRef {
  std::string name;
  Param<T>* param;
};

// Non-trainable state that still belongs in a checkpoint (BN running stats).
template <typename T>
struct BufferRef {
  std::string name;
  Tensor<T>* tensor;
};

inline int conv_out_size(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

// im2col with batch-major columns: cols is [Cin*K*K, N*OH*OW], column index
// n*OH*OW + oh*OW + ow. Out-of-image taps read as zero.
template <typename T>
void im2col(const Tensor<T>& x, int k, int stride, int pad, int oh, int ow,
            Tensor<T>& cols) {
  const int n_batch = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int64_t ncols = static_cast<int64_t>(n_batch) * oh * ow;
  cols = Tensor<T>({cin * k * k, static_cast<int>(ncols)});
  T* cd = cols.data.data();
  const T* xd = x.data.data();
  for (int ci = 0; ci < cin; ++ci) {
    for (int kh = 0; kh < k; ++kh) {
      for (int kw = 0; kw < k; ++kw) {
        const int64_t row = (static_cast<int64_t>(ci) * k + kh) * k + kw;
        T* crow = cd + row * ncols;
        for (int n = 0; n < n_batch; ++n) {
          const T* xplane = xd + (static_cast<int64_t>(n) * cin + ci) * h * w;
          T* cptr = crow + static_cast<int64_t>(n) * oh * ow;
          for (int r = 0; r < oh; ++r) {
            const int ih = r * stride - pad + kh;
            if (ih < 0 || ih >= h) {
              std::fill(cptr, cptr + ow, T(0));
              cptr += ow;
              continue;
            }
            const T* xrow = xplane + static_cast<int64_t>(ih) * w;
            for (int c = 0; c < ow; ++c) {
              const int iw = c * stride - pad + kw;
              *cptr++ = (iw < 0 || iw >= w) ? T(0) : xrow[iw];
            }
          }
        }
      }
    }
  }
}

// Scatter-add inverse of im2col. x must be pre-sized; it is zeroed here.
template <typename T>
void col2im(const Tensor<T>& cols, int k, int stride, int pad, int oh, int ow,
            Tensor<T>& x) {
  const int n_batch = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int64_t ncols = static_cast<int64_t>(n_batch) * oh * ow;
  x.fill(T(0));
  const T* cd = cols.data.data();
  T* xd = x.data.data();
  for (int ci = 0; ci < cin; ++ci) {
    for (int kh = 0; kh < k; ++kh) {
      for (int kw = 0; kw < k; ++kw) {
        const int64_t row = (static_cast<int64_t>(ci) * k + kh) * k + kw;
        const T* crow = cd + row * ncols;
        for (int n = 0; n < n_batch; ++n) {
          T* xplane = xd + (static_cast<int64_t>(n) * cin + ci) * h * w;
          const T* cptr = crow + static_cast<int64_t>(n) * oh * ow;
          for (int r = 0; r < oh; ++r) {
            const int ih = r * stride - pad + kh;
            if (ih < 0 || ih >= h) {
              cptr += ow;
              continue;
            }
            T* xrow = xplane + static_cast<int64_t>(ih) * w;
            for (int c = 0; c < ow; ++c) {
              const int iw = c * stride - pad + kw;
              if (iw >= 0 && iw < w) xrow[iw] += cptr[c];
            }
            cptr += ow;
          }
        }
      }
    }
  }
}

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool train) = 0;
  virtual Tensor<T> backward(const Tensor<T>& dy) = 0;
  virtual void collect_params(const std::string& prefix,
                              std::vector<ParamRef<T>>& out) {}
  virtual void collect_buffers(const std::string& prefix,
                               std::vector<BufferRef<T>>& out) {}
};

template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(int in_ch, int out_ch, int k, int stride, int pad, Rng& rng,
         double wstd = 0.02)
      : in_ch_(in_ch), out_ch_(out_ch), k_(k), stride_(stride), pad_(pad) {
    w.init({out_ch, in_ch, k, k});
    b.init({out_ch});
    for (auto& v : w.value.data) v = static_cast<T>(wstd * rng.gaussian());
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    if (x.ndim() != 4 || x.dim(1) != in_ch_)
      throw ShapeError("Conv2d: input " + x.shape_str() + " incompatible with in_ch=" +
                       std::to_string(in_ch_));
    xshape_ = x.shape;
    oh_ = conv_out_size(x.dim(2), k_, stride_, pad_);
    ow_ = conv_out_size(x.dim(3), k_, stride_, pad_);
    if (oh_ <= 0 || ow_ <= 0) throw ShapeError("Conv2d: output size would be empty");
    const int n = x.dim(0);
    im2col(x, k_, stride_, pad_, oh_, ow_, cols_);
    const int64_t ncols = cols_.dim(1);
    Tensor<T> yall({out_ch_, static_cast<int>(ncols)});
    as_mat(yall, out_ch_, ncols).noalias() =
        as_mat(w.value, out_ch_, in_ch_ * k_ * k_) * as_mat(cols_, cols_.dim(0), ncols);
    Tensor<T> y({n, out_ch_, oh_, ow_});
    const int64_t plane = static_cast<int64_t>(oh_) * ow_;
    for (int i = 0; i < n; ++i)
      for (int co = 0; co < out_ch_; ++co) {
        const T* src = yall.data.data() + co * ncols + i * plane;
        T* dst = y.data.data() + (static_cast<int64_t>(i) * out_ch_ + co) * plane;
        const T bias = b.value.data[co];
        for (int64_t p = 0; p < plane; ++p) dst[p] = src[p] + bias;
      }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const int n = dy.dim(0);
    const int64_t plane = static_cast<int64_t>(oh_) * ow_;
    const int64_t ncols = static_cast<int64_t>(n) * plane;
    Tensor<T> dyall({out_ch_, static_cast<int>(ncols)});
    for (int i = 0; i < n; ++i)
      for (int co = 0; co < out_ch_; ++co) {
        const T* src = dy.data.data() + (static_cast<int64_t>(i) * out_ch_ + co) * plane;
        T* dst = dyall.data.data() + co * ncols + i * plane;
        std::copy(src, src + plane, dst);
        T s = T(0);
        for (int64_t p = 0; p < plane; ++p) s += src[p];
        b.grad.data[co] += s;
      }
    const int ckk = in_ch_ * k_ * k_;
    as_mat(w.grad, out_ch_, ckk).noalias() +=
        as_mat(dyall, out_ch_, ncols) * as_mat(cols_, ckk, ncols).transpose();
    Tensor<T> dcols({ckk, static_cast<int>(ncols)});
    as_mat(dcols, ckk, ncols).noalias() =
        as_mat(w.value, out_ch_, ckk).transpose() * as_mat(dyall, out_ch_, ncols);
    Tensor<T> dx(xshape_);
    col2im(dcols, k_, stride_, pad_, oh_, ow_, dx);
    return dx;
  }

  void collect_params(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + ".w", &w});
    out.push_back({p + ".b", &b});
  }

  Param<T> w, b;

 private:
  int in_ch_, out_ch_, k_, stride_, pad_, oh_ = 0, ow_ = 0;
  std::vector<int> xshape_;
  Tensor<T> cols_;
};

// Transposed convolution. Weight layout [Cin, Cout, K, K]; implemented via the
// conv identities: forward = conv backward-data, backward-data = conv forward,
// with output size stride*(H-1) + K - 2*pad.
template <typename T>
class ConvTranspose2d : public Layer<T> {
 public:
  ConvTranspose2d(int in_ch, int out_ch, int k, int stride, int pad, Rng& rng,
                  double wstd = 0.02)
      : in_ch_(in_ch), out_ch_(out_ch), k_(k), stride_(stride), pad_(pad) {
    w.init({in_ch, out_ch, k, k});
    b.init({out_ch});
    for (auto& v : w.value.data) v = static_cast<T>(wstd * rng.gaussian());
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    if (x.ndim() != 4 || x.dim(1) != in_ch_)
      throw ShapeError("ConvTranspose2d: input " + x.shape_str() +
                       " incompatible with in_ch=" + std::to_string(in_ch_));
    x_ = x;
    const int n = x.dim(0), h = x.dim(2), wd = x.dim(3);
    const int yh = stride_ * (h - 1) + k_ - 2 * pad_;
    const int yw = stride_ * (wd - 1) + k_ - 2 * pad_;
    if (yh <= 0 || yw <= 0) throw ShapeError("ConvTranspose2d: empty output");
    const int64_t ncols = static_cast<int64_t>(n) * h * wd;
    const int okk = out_ch_ * k_ * k_;
    // x as [Cin, N*H*W] with batch-major columns
    Tensor<T> xall({in_ch_, static_cast<int>(ncols)});
    gather_channel_major(x, xall);
    Tensor<T> ycols({okk, static_cast<int>(ncols)});
    as_mat(ycols, okk, ncols).noalias() =
        as_mat(w.value, in_ch_, okk).transpose() * as_mat(xall, in_ch_, ncols);
    Tensor<T> y({n, out_ch_, yh, yw});
    col2im(ycols, k_, stride_, pad_, h, wd, y);
    for (int i = 0; i < n; ++i)
      for (int co = 0; co < out_ch_; ++co) {
        T* dst = y.data.data() + (static_cast<int64_t>(i) * out_ch_ + co) *
                                     static_cast<int64_t>(yh) * yw;
        const T bias = b.value.data[co];
        for (int64_t p = 0; p < static_cast<int64_t>(yh) * yw; ++p) dst[p] += bias;
      }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const int n = x_.dim(0), h = x_.dim(2), wd = x_.dim(3);
    const int64_t ncols = static_cast<int64_t>(n) * h * wd;
    const int okk = out_ch_ * k_ * k_;
    Tensor<T> dycols;
    im2col(dy, k_, stride_, pad_, h, wd, dycols);
    // dX = W * im2col(dY)
    Tensor<T> dxall({in_ch_, static_cast<int>(ncols)});
    as_mat(dxall, in_ch_, ncols).noalias() =
        as_mat(w.value, in_ch_, okk) * as_mat(dycols, okk, ncols);
    // dW += X * im2col(dY)^T
    Tensor<T> xall({in_ch_, static_cast<int>(ncols)});
    gather_channel_major(x_, xall);
    as_mat(w.grad, in_ch_, okk).noalias() +=
        as_mat(xall, in_ch_, ncols) * as_mat(dycols, okk, ncols).transpose();
    for (int i = 0; i < n; ++i)
      for (int co = 0; co < out_ch_; ++co) {
        const int64_t plane = static_cast<int64_t>(dy.dim(2)) * dy.dim(3);
        const T* src = dy.data.data() + (static_cast<int64_t>(i) * out_ch_ + co) * plane;
        T s = T(0);
        for (int64_t p = 0; p < plane; ++p) s += src[p];
        b.grad.data[co] += s;
      }
    Tensor<T> dx(x_.shape);
    scatter_channel_major(dxall, dx);
    return dx;
  }

  void collect_params(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + ".w", &w});
    out.push_back({p + ".b", &b});
  }

  Param<T> w, b;

 private:
  static void gather_channel_major(const Tensor<T>& x, Tensor<T>& xall) {
    const int n = x.dim(0), c = x.dim(1);
    const int64_t plane = static_cast<int64_t>(x.dim(2)) * x.dim(3);
    const int64_t ncols = static_cast<int64_t>(n) * plane;
    for (int i = 0; i < n; ++i)
      for (int ci = 0; ci < c; ++ci)
        std::copy(x.data.data() + (static_cast<int64_t>(i) * c + ci) * plane,
                  x.data.data() + (static_cast<int64_t>(i) * c + ci + 1) * plane,
                  xall.data.data() + ci * ncols + i * plane);
  }
  static void scatter_channel_major(const Tensor<T>& xall, Tensor<T>& x) {
    const int n = x.dim(0), c = x.dim(1);
    const int64_t plane = static_cast<int64_t>(x.dim(2)) * x.dim(3);
    const int64_t ncols = static_cast<int64_t>(n) * plane;
    for (int i = 0; i < n; ++i)
      for (int ci = 0; ci < c; ++ci)
        std::copy(xall.data.data() + ci * ncols + i * plane,
                  xall.data.data() + ci * ncols + (i + 1) * plane,
                  x.data.data() + (static_cast<int64_t>(i) * c + ci) * plane);
  }

  int in_ch_, out_ch_, k_, stride_, pad_;
  Tensor<T> x_;
};

// Per-channel batch normalization over [N, H, W]. Running stats use the biased
// batch variance; eval mode normalizes with the running estimates.
template <typename T>
class BatchNorm2d : public Layer<T> {
 public:
  explicit BatchNorm2d(int channels, double eps = 1e-5, double momentum = 0.1)
      : ch_(channels), eps_(static_cast<T>(eps)), momentum_(static_cast<T>(momentum)) {
    gamma.init({channels});
    beta.init({channels});
    gamma.value.fill(T(1));
    running_mean = Tensor<T>({channels});
    running_var = Tensor<T>({channels});
    running_var.fill(T(1));
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) override {
    if (x.dim(1) != ch_) throw ShapeError("BatchNorm2d: channel mismatch");
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const int64_t m = static_cast<int64_t>(n) * h * w;
    train_ = train;
    Tensor<T> y(x.shape);
    if (train) {
      xhat_ = Tensor<T>(x.shape);
      invstd_ = Tensor<T>({ch_});
      m_ = m;
      for (int c = 0; c < ch_; ++c) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) {
          const T* p = plane_ptr(x, i, c);
          for (int64_t j = 0; j < static_cast<int64_t>(h) * w; ++j) mean += p[j];
        }
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
          const T* p = plane_ptr(x, i, c);
          for (int64_t j = 0; j < static_cast<int64_t>(h) * w; ++j) {
            const double d = p[j] - mean;
            var += d * d;
          }
        }
        var /= static_cast<double>(m);
        const T inv = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(eps_)));
        invstd_.data[c] = inv;
        running_mean.data[c] = (T(1) - momentum_) * running_mean.data[c] +
                               momentum_ * static_cast<T>(mean);
        running_var.data[c] =
            (T(1) - momentum_) * running_var.data[c] + momentum_ * static_cast<T>(var);
        const T g = gamma.value.data[c], bt = beta.value.data[c];
        for (int i = 0; i < n; ++i) {
          const T* p = plane_ptr(x, i, c);
          T* xh = plane_ptr(xhat_, i, c);
          T* yp = plane_ptr(y, i, c);
          for (int64_t j = 0; j < static_cast<int64_t>(h) * w; ++j) {
            xh[j] = (p[j] - static_cast<T>(mean)) * inv;
            yp[j] = g * xh[j] + bt;
          }
        }
      }
    } else {
      for (int c = 0; c < ch_; ++c) {
        const T inv = static_cast<T>(
            1.0 / std::sqrt(static_cast<double>(running_var.data[c]) +
                            static_cast<double>(eps_)));
        const T mean = running_mean.data[c];
        const T g = gamma.value.data[c], bt = beta.value.data[c];
        for (int i = 0; i < n; ++i) {
          const T* p = plane_ptr(x, i, c);
          T* yp = plane_ptr(y, i, c);
          for (int64_t j = 0; j < static_cast<int64_t>(h) * w; ++j)
            yp[j] = g * (p[j] - mean) * inv + bt;
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    if (!train_) throw ShapeError("BatchNorm2d: backward requires train-mode forward");
    const int n = dy.dim(0), h = dy.dim(2), w = dy.dim(3);
    Tensor<T> dx(dy.shape);
    const double m = static_cast<double>(m_);
    for (int c = 0; c < ch_; ++c) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (int i = 0; i < n; ++i) {
        const T* d = plane_ptr(dy, i, c);
        const T* xh = plane_ptr(xhat_, i, c);
        for (int64_t j = 0; j < static_cast<int64_t>(h) * w; ++j) {
          sum_dy += d[j];
          sum_dy_xhat += static_cast<double>(d[j]) * xh[j];
        }
      }
      beta.grad.data[c] += static_cast<T>(sum_dy);
      gamma.grad.data[c] += static_cast<T>(sum_dy_xhat);
      const double g = gamma.value.data[c];
      const double inv = invstd_.data[c];
      const double k = g * inv / m;
      for (int i = 0; i < n; ++i) {
        const T* d = plane_ptr(dy, i, c);
        const T* xh = plane_ptr(xhat_, i, c);
        T* dxp = plane_ptr(dx, i, c);
        for (int64_t j = 0; j < static_cast<int64_t>(h) * w; ++j)
          dxp[j] = static_cast<T>(k * (m * d[j] - sum_dy - xh[j] * sum_dy_xhat));
      }
    }
    return dx;
  }

  void collect_params(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + ".gamma", &gamma});
    out.push_back({p + ".beta", &beta});
  }
  void collect_buffers(const std::string& p, std::vector<BufferRef<T>>& out) override {
    out.push_back({p + ".running_mean", &running_mean});
    out.push_back({p + ".running_var", &running_var});
  }

  Param<T> gamma, beta;
  Tensor<T> running_mean, running_var;

 private:
  template <typename U>
  static auto* plane_ptr(U& t, int n, int c) {
    return t.data.data() +
           (static_cast<int64_t>(n) * t.shape[1] + c) *
               static_cast<int64_t>(t.shape[2]) * t.shape[3];
  }

  int ch_;
  T eps_, momentum_;
  bool train_ = false;
  int64_t m_ = 0;
  Tensor<T> xhat_, invstd_;
};

template <typename T>
class Dense : public Layer<T> {
 public:
  Dense(int in_dim, int out_dim, Rng& rng, double wstd = 0.02)
      : in_(in_dim), out_(out_dim) {
    w.init({out_dim, in_dim});
    b.init({out_dim});
    for (auto& v : w.value.data) v = static_cast<T>(wstd * rng.gaussian());
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    if (x.ndim() != 2 || x.dim(1) != in_)
      throw ShapeError("Dense: input " + x.shape_str() + " incompatible with in=" +
                       std::to_string(in_));
    x_ = x;
    const int n = x.dim(0);
    Tensor<T> y({n, out_});
    as_mat(y, n, out_).noalias() =
        as_mat(x, n, in_) * as_mat(w.value, out_, in_).transpose();
    for (int i = 0; i < n; ++i)
      for (int o = 0; o < out_; ++o) y.at2(i, o) += b.value.data[o];
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const int n = dy.dim(0);
    as_mat(w.grad, out_, in_).noalias() +=
        as_mat(dy, n, out_).transpose() * as_mat(x_, n, in_);
    for (int i = 0; i < n; ++i)
      for (int o = 0; o < out_; ++o) b.grad.data[o] += dy.at2(i, o);
    Tensor<T> dx({n, in_});
    as_mat(dx, n, in_).noalias() = as_mat(dy, n, out_) * as_mat(w.value, out_, in_);
    return dx;
  }

  void collect_params(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + ".w", &w});
    out.push_back({p + ".b", &b});
  }

  Param<T> w, b;

 private:
  int in_, out_;
  Tensor<T> x_;
};

template <typename T>
class LeakyReLU : public Layer<T> {
 public:
  explicit LeakyReLU(double slope = 0.2) : slope_(static_cast<T>(slope)) {}
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    x_ = x;
    Tensor<T> y = x;
    for (auto& v : y.data)
      if (v < T(0)) v *= slope_;
    return y;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.data.size(); ++i)
      if (x_.data[i] < T(0)) dx.data[i] *= slope_;
    return dx;
  }

 private:
  T slope_;
  Tensor<T> x_;
};

template <typename T>
class ReLU : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    x_ = x;
    Tensor<T> y = x;
    for (auto& v : y.data)
      if (v < T(0)) v = T(0);
    return y;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.data.size(); ++i)
      if (x_.data[i] <= T(0)) dx.data[i] = T(0);
    return dx;
  }

 private:
  Tensor<T> x_;
};

template <typename T>
class Tanh : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    y_ = x;
    for (auto& v : y_.data) v = std::tanh(v);
    return y_;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.data.size(); ++i)
      dx.data[i] *= T(1) - y_.data[i] * y_.data[i];
    return dx;
  }

 private:
  Tensor<T> y_;
};

// Sigmoid clamped to [eps, 1-eps]; keeps the (0,1)-open-interval contract under
// float saturation and matches the epsilon the log-losses clamp with.
template <typename T>
class Sigmoid : public Layer<T> {
 public:
  static constexpr double kEps = 1e-7;
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    y_ = x;
    for (auto& v : y_.data) {
      const double s = 1.0 / (1.0 + std::exp(-static_cast<double>(v)));
      v = static_cast<T>(std::min(1.0 - kEps, std::max(kEps, s)));
    }
    return y_;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.data.size(); ++i)
      dx.data[i] *= y_.data[i] * (T(1) - y_.data[i]);
    return dx;
  }

 private:
  Tensor<T> y_;
};

// [N, C, H, W] <-> [N, D] with D = C*H*W. to_shape holds the per-sample dims.
template <typename T>
class Reshape : public Layer<T> {
 public:
  explicit Reshape(std::vector<int> per_sample_shape)
      : to_(std::move(per_sample_shape)) {}
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    from_ = x.shape;
    std::vector<int> s{x.dim(0)};
    s.insert(s.end(), to_.begin(), to_.end());
    return x.reshaped(s);
  }
  Tensor<T> backward(const Tensor<T>& dy) override { return dy.reshaped(from_); }

 private:
  std::vector<int> to_, from_;
};

template <typename T>
class Sequential {
 public:
  template <typename L, typename... Args>
  L* add(const std::string& name, Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L* raw = layer.get();
    names_.push_back(name);
    layers_.push_back(std::move(layer));
    return raw;
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> h = x;
    for (auto& l : layers_) h = l->forward(h, train);
    return h;
  }

  // Forward that records the activation after each listed layer index
  // (indices must be ascending).
  Tensor<T> forward_collect(const Tensor<T>& x, bool train,
                            const std::vector<size_t>& tap_after,
                            std::vector<Tensor<T>>& taps) {
    taps.clear();
    Tensor<T> h = x;
    size_t next = 0;
    for (size_t i = 0; i < layers_.size(); ++i) {
      h = layers_[i]->forward(h, train);
      if (next < tap_after.size() && tap_after[next] == i) {
        taps.push_back(h);
        ++next;
      }
    }
    return h;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
  }

  size_t size() const { return layers_.size(); }
  Layer<T>* layer(size_t i) { return layers_[i].get(); }
  const std::string& name(size_t i) const { return names_[i]; }

  void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    for (size_t i = 0; i < layers_.size(); ++i)
      layers_[i]->collect_params(prefix + "." + names_[i], out);
  }
  void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) {
    for (size_t i = 0; i < layers_.size(); ++i)
      layers_[i]->collect_buffers(prefix + "." + names_[i], out);
  }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::vector<std::string> names_;
};

enum class OptimizerKind { adam, sgd };

// Adam with bias correction; sgd mode is plain gradient descent (used by the
// descent sanity tests, selectable from the training config).
template <typename T>
class Optimizer {
 public:
  Optimizer(std::vector<ParamRef<T>> params, OptimizerKind kind, double lr,
            double beta1 = 0.5, double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)),
        kind_(kind),
        lr_(static_cast<T>(lr)),
        b1_(static_cast<T>(beta1)),
        b2_(static_cast<T>(beta2)),
        eps_(static_cast<T>(eps)) {
    if (kind_ == OptimizerKind::adam) {
      m_.reserve(params_.size());
      v_.reserve(params_.size());
      for (auto& p : params_) {
        m_.emplace_back(p.param->value.shape);
        v_.emplace_back(p.param->value.shape);
      }
    }
  }

  void zero_grad() {
    for (auto& p : params_) p.param->zero_grad();
  }

  void step() {
    ++t_;
    if (kind_ == OptimizerKind::sgd) {
      for (auto& p : params_)
        for (size_t i = 0; i < p.param->value.data.size(); ++i)
          p.param->value.data[i] -= lr_ * p.param->grad.data[i];
      return;
    }
    const T c1 = T(1) - static_cast<T>(std::pow(static_cast<double>(b1_), t_));
    const T c2 = T(1) - static_cast<T>(std::pow(static_cast<double>(b2_), t_));
    for (size_t k = 0; k < params_.size(); ++k) {
      auto& val = params_[k].param->value.data;
      auto& grd = params_[k].param->grad.data;
      auto& m = m_[k].data;
      auto& v = v_[k].data;
      for (size_t i = 0; i < val.size(); ++i) {
        m[i] = b1_ * m[i] + (T(1) - b1_) * grd[i];
        v[i] = b2_ * v[i] + (T(1) - b2_) * grd[i] * grd[i];
        const T mhat = m[i] / c1;
        const T vhat = v[i] / c2;
        val[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

 private:
  std::vector<ParamRef<T>> params_;
  OptimizerKind kind_;
  T lr_, b1_, b2_, eps_;
  int64_t t_ = 0;
  std::vector<Tensor<T>> m_, v_;
};

}  // namespace wildgan::nn
