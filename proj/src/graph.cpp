#include "ergan/graph.hpp"

#include <cmath>
#include <string>

#include "ergan/errors.hpp"

namespace ergan {

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

void check_same_shape(const Mat& a, const Mat& b, const char* op) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw DataError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows) + "x" +
                        std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                        std::to_string(b.cols) + ")");
    }
}

}  // namespace

Graph::Ref Graph::push(Node n) {
    if (ran_backward_) throw DataError("graph: cannot extend after backward()");
    nodes_.push_back(std::move(n));
    const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
    return Ref{id, static_cast<std::uint32_t>(nodes_.back().val.rows),
               static_cast<std::uint32_t>(nodes_.back().val.cols)};
}

Graph::Ref Graph::constant(Mat value) {
    Node n;
    n.op = Op::kConst;
    n.val = std::move(value);
    return push(std::move(n));
}

Graph::Ref Graph::constant(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (values.size() != rows * cols) throw DataError("graph constant: size mismatch");
    Mat m(rows, cols);
    std::copy(values.begin(), values.end(), m.a.begin());
    return constant(std::move(m));
}

Graph::Ref Graph::scalar_constant(double value) {
    Mat m(1, 1);
    m.a[0] = value;
    return constant(std::move(m));
}

Graph::Ref Graph::leaf(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (values.size() != rows * cols) throw DataError("graph leaf: size mismatch");
    Node n;
    n.op = Op::kLeaf;
    n.needs_grad = true;
    n.val = Mat(rows, cols);
    std::copy(values.begin(), values.end(), n.val.a.begin());
    return push(std::move(n));
}

Graph::Ref Graph::linear(Ref x, Ref w) {
    const Mat& xv = at(x).val;
    const Mat& wv = at(w).val;
    if (xv.cols != wv.cols) {
        throw DataError("linear: input width " + std::to_string(xv.cols) +
                        " does not match weight fan-in " + std::to_string(wv.cols));
    }
    Node n;
    n.op = Op::kLinear;
    n.in0 = x.id;
    n.in1 = w.id;
    n.needs_grad = at(x).needs_grad || at(w).needs_grad;
    n.val = Mat(xv.rows, wv.rows);
    for (std::size_t b = 0; b < xv.rows; ++b) {
        const double* xr = xv.row(b);
        double* yr = n.val.row(b);
        for (std::size_t o = 0; o < wv.rows; ++o) {
            const double* wr = wv.row(o);
            double s = 0.0;
            for (std::size_t i = 0; i < xv.cols; ++i) s += xr[i] * wr[i];
            yr[o] = s;
        }
    }
    return push(std::move(n));
}

Graph::Ref Graph::add(Ref a, Ref b) {
    const Mat& av = at(a).val;
    const Mat& bv = at(b).val;
    check_same_shape(av, bv, "add");
    Node n;
    n.op = Op::kAdd;
    n.in0 = a.id;
    n.in1 = b.id;
    n.needs_grad = at(a).needs_grad || at(b).needs_grad;
    n.val = av;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.a[i] += bv.a[i];
    return push(std::move(n));
}

Graph::Ref Graph::sub(Ref a, Ref b) {
    const Mat& av = at(a).val;
    const Mat& bv = at(b).val;
    check_same_shape(av, bv, "sub");
    Node n;
    n.op = Op::kSub;
    n.in0 = a.id;
    n.in1 = b.id;
    n.needs_grad = at(a).needs_grad || at(b).needs_grad;
    n.val = av;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.a[i] -= bv.a[i];
    return push(std::move(n));
}

Graph::Ref Graph::mul(Ref a, Ref b) {
    const Mat& av = at(a).val;
    const Mat& bv = at(b).val;
    check_same_shape(av, bv, "mul");
    Node n;
    n.op = Op::kMul;
    n.in0 = a.id;
    n.in1 = b.id;
    n.needs_grad = at(a).needs_grad || at(b).needs_grad;
    n.val = av;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.a[i] *= bv.a[i];
    return push(std::move(n));
}

Graph::Ref Graph::add_rowvec(Ref x, Ref v) {
    const Mat& xv = at(x).val;
    const Mat& vv = at(v).val;
    if (vv.rows != 1 || vv.cols != xv.cols) throw DataError("add_rowvec: shape mismatch");
    Node n;
    n.op = Op::kAddRowVec;
    n.in0 = x.id;
    n.in1 = v.id;
    n.needs_grad = at(x).needs_grad || at(v).needs_grad;
    n.val = xv;
    for (std::size_t b = 0; b < xv.rows; ++b) {
        double* r = n.val.row(b);
        for (std::size_t j = 0; j < xv.cols; ++j) r[j] += vv.a[j];
    }
    return push(std::move(n));
}

Graph::Ref Graph::sub_colvec(Ref x, Ref v) {
    const Mat& xv = at(x).val;
    const Mat& vv = at(v).val;
    if (vv.cols != 1 || vv.rows != xv.rows) throw DataError("sub_colvec: shape mismatch");
    Node n;
    n.op = Op::kSubColVec;
    n.in0 = x.id;
    n.in1 = v.id;
    n.needs_grad = at(x).needs_grad || at(v).needs_grad;
    n.val = xv;
    for (std::size_t b = 0; b < xv.rows; ++b) {
        double* r = n.val.row(b);
        for (std::size_t j = 0; j < xv.cols; ++j) r[j] -= vv.a[b];
    }
    return push(std::move(n));
}

Graph::Ref Graph::affine(Ref x, double scale, double shift) {
    Node n;
    n.op = Op::kAffine;
    n.in0 = x.id;
    n.p0 = scale;
    n.p1 = shift;
    n.needs_grad = at(x).needs_grad;
    n.val = at(x).val;
    for (double& v : n.val.a) v = scale * v + shift;
    return push(std::move(n));
}

Graph::Ref Graph::sigmoid(Ref x) {
    Node n;
    n.op = Op::kSigmoid;
    n.in0 = x.id;
    n.needs_grad = at(x).needs_grad;
    n.val = at(x).val;
    for (double& v : n.val.a) v = stable_sigmoid(v);
    return push(std::move(n));
}

Graph::Ref Graph::tanh(Ref x) {
    Node n;
    n.op = Op::kTanh;
    n.in0 = x.id;
    n.needs_grad = at(x).needs_grad;
    n.val = at(x).val;
    for (double& v : n.val.a) v = std::tanh(v);
    return push(std::move(n));
}

Graph::Ref Graph::log(Ref x) {
    Node n;
    n.op = Op::kLog;
    n.in0 = x.id;
    n.needs_grad = at(x).needs_grad;
    n.val = at(x).val;
    for (double& v : n.val.a) v = std::log(v);
    return push(std::move(n));
}

Graph::Ref Graph::abs(Ref x) {
    Node n;
    n.op = Op::kAbs;
    n.in0 = x.id;
    n.needs_grad = at(x).needs_grad;
    n.val = at(x).val;
    for (double& v : n.val.a) v = std::fabs(v);
    return push(std::move(n));
}

Graph::Ref Graph::clamp(Ref x, double lo, double hi) {
    Node n;
    n.op = Op::kClamp;
    n.in0 = x.id;
    n.p0 = lo;
    n.p1 = hi;
    n.needs_grad = at(x).needs_grad;
    n.val = at(x).val;
    for (double& v : n.val.a) v = v < lo ? lo : (v > hi ? hi : v);
    return push(std::move(n));
}

Graph::Ref Graph::slice_cols(Ref x, std::size_t c0, std::size_t c1) {
    const Mat& xv = at(x).val;
    if (c0 >= c1 || c1 > xv.cols) throw DataError("slice_cols: bad range");
    Node n;
    n.op = Op::kSliceCols;
    n.in0 = x.id;
    n.u0 = c0;
    n.u1 = c1;
    n.needs_grad = at(x).needs_grad;
    n.val = Mat(xv.rows, c1 - c0);
    for (std::size_t b = 0; b < xv.rows; ++b) {
        const double* src = xv.row(b);
        double* dst = n.val.row(b);
        for (std::size_t j = c0; j < c1; ++j) dst[j - c0] = src[j];
    }
    return push(std::move(n));
}

Graph::Ref Graph::concat_cols(std::span<const Ref> parts) {
    if (parts.empty()) throw DataError("concat_cols: no inputs");
    const std::size_t rows = at(parts[0]).val.rows;
    std::size_t cols = 0;
    bool needs = false;
    for (Ref p : parts) {
        if (at(p).val.rows != rows) throw DataError("concat_cols: row mismatch");
        cols += at(p).val.cols;
        needs = needs || at(p).needs_grad;
    }
    Node n;
    n.op = Op::kConcatCols;
    n.needs_grad = needs;
    n.aux_begin = static_cast<std::uint32_t>(aux_.size());
    n.aux_count = static_cast<std::uint32_t>(parts.size());
    for (Ref p : parts) aux_.push_back(p.id);
    n.val = Mat(rows, cols);
    for (std::size_t b = 0; b < rows; ++b) {
        double* dst = n.val.row(b);
        std::size_t off = 0;
        for (Ref p : parts) {
            const Mat& pv = at(p).val;
            const double* src = pv.row(b);
            for (std::size_t j = 0; j < pv.cols; ++j) dst[off + j] = src[j];
            off += pv.cols;
        }
    }
    return push(std::move(n));
}

Graph::Ref Graph::row_mean(Ref x) {
    const Mat& xv = at(x).val;
    Node n;
    n.op = Op::kRowMean;
    n.in0 = x.id;
    n.needs_grad = at(x).needs_grad;
    n.val = Mat(xv.rows, 1);
    for (std::size_t b = 0; b < xv.rows; ++b) {
        const double* r = xv.row(b);
        double s = 0.0;
        for (std::size_t j = 0; j < xv.cols; ++j) s += r[j];
        n.val.a[b] = s / static_cast<double>(xv.cols);
    }
    return push(std::move(n));
}

Graph::Ref Graph::col_mean(Ref x) {
    const Mat& xv = at(x).val;
    Node n;
    n.op = Op::kColMean;
    n.in0 = x.id;
    n.needs_grad = at(x).needs_grad;
    n.val = Mat(1, xv.cols);
    for (std::size_t b = 0; b < xv.rows; ++b) {
        const double* r = xv.row(b);
        for (std::size_t j = 0; j < xv.cols; ++j) n.val.a[j] += r[j];
    }
    for (double& v : n.val.a) v /= static_cast<double>(xv.rows);
    return push(std::move(n));
}

Graph::Ref Graph::mean_all(Ref x) {
    const Mat& xv = at(x).val;
    Node n;
    n.op = Op::kMeanAll;
    n.in0 = x.id;
    n.needs_grad = at(x).needs_grad;
    n.val = Mat(1, 1);
    double s = 0.0;
    for (double v : xv.a) s += v;
    n.val.a[0] = s / static_cast<double>(xv.size());
    return push(std::move(n));
}

Graph::Ref Graph::sum_all(Ref x) {
    const Mat& xv = at(x).val;
    Node n;
    n.op = Op::kSumAll;
    n.in0 = x.id;
    n.needs_grad = at(x).needs_grad;
    n.val = Mat(1, 1);
    double s = 0.0;
    for (double v : xv.a) s += v;
    n.val.a[0] = s;
    return push(std::move(n));
}

const Mat& Graph::value(Ref r) const { return at(r).val; }

double Graph::scalar(Ref r) const {
    const Mat& v = at(r).val;
    if (v.rows != 1 || v.cols != 1) throw DataError("graph scalar: node is not 1x1");
    return v.a[0];
}

Mat& Graph::grad_buf(std::uint32_t id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) n.grad = Mat(n.val.rows, n.val.cols);
    return n.grad;
}

void Graph::backward(Ref loss) {
    const Mat& lv = at(loss).val;
    if (lv.rows != 1 || lv.cols != 1) {
        throw DataError("backward: loss must be a scalar (1x1), got " + std::to_string(lv.rows) +
                        "x" + std::to_string(lv.cols));
    }
    if (ran_backward_) throw DataError("backward: already ran on this graph");
    ran_backward_ = true;
    grad_buf(loss.id).a[0] = 1.0;
    for (std::uint32_t id = loss.id + 1; id-- > 0;) {
        const Node& n = nodes_[id];
        if (!n.needs_grad || n.grad.size() == 0) continue;
        backprop_node(id);
    }
}

void Graph::backprop_node(std::uint32_t id) {
    Node& n = nodes_[id];
    const Mat& g = n.grad;
    auto wants = [&](std::uint32_t in) { return nodes_[in].needs_grad; };
    switch (n.op) {
        case Op::kConst:
        case Op::kLeaf:
            break;
        case Op::kLinear: {
            const Mat& xv = nodes_[n.in0].val;
            const Mat& wv = nodes_[n.in1].val;
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                for (std::size_t b = 0; b < xv.rows; ++b) {
                    const double* gr = g.row(b);
                    double* gxr = gx.row(b);
                    for (std::size_t o = 0; o < wv.rows; ++o) {
                        const double go = gr[o];
                        if (go == 0.0) continue;
                        const double* wr = wv.row(o);
                        for (std::size_t i = 0; i < xv.cols; ++i) gxr[i] += go * wr[i];
                    }
                }
            }
            if (wants(n.in1)) {
                Mat& gw = grad_buf(n.in1);
                for (std::size_t b = 0; b < xv.rows; ++b) {
                    const double* gr = g.row(b);
                    const double* xr = xv.row(b);
                    for (std::size_t o = 0; o < wv.rows; ++o) {
                        const double go = gr[o];
                        if (go == 0.0) continue;
                        double* gwr = gw.row(o);
                        for (std::size_t i = 0; i < xv.cols; ++i) gwr[i] += go * xr[i];
                    }
                }
            }
            break;
        }
        case Op::kAdd: {
            if (wants(n.in0)) {
                Mat& ga = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) ga.a[i] += g.a[i];
            }
            if (wants(n.in1)) {
                Mat& gb = grad_buf(n.in1);
                for (std::size_t i = 0; i < g.size(); ++i) gb.a[i] += g.a[i];
            }
            break;
        }
        case Op::kSub: {
            if (wants(n.in0)) {
                Mat& ga = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) ga.a[i] += g.a[i];
            }
            if (wants(n.in1)) {
                Mat& gb = grad_buf(n.in1);
                for (std::size_t i = 0; i < g.size(); ++i) gb.a[i] -= g.a[i];
            }
            break;
        }
        case Op::kMul: {
            const Mat& av = nodes_[n.in0].val;
            const Mat& bv = nodes_[n.in1].val;
            if (wants(n.in0)) {
                Mat& ga = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) ga.a[i] += g.a[i] * bv.a[i];
            }
            if (wants(n.in1)) {
                Mat& gb = grad_buf(n.in1);
                for (std::size_t i = 0; i < g.size(); ++i) gb.a[i] += g.a[i] * av.a[i];
            }
            break;
        }
        case Op::kAddRowVec: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) gx.a[i] += g.a[i];
            }
            if (wants(n.in1)) {
                Mat& gv = grad_buf(n.in1);
                for (std::size_t b = 0; b < g.rows; ++b) {
                    const double* gr = g.row(b);
                    for (std::size_t j = 0; j < g.cols; ++j) gv.a[j] += gr[j];
                }
            }
            break;
        }
        case Op::kSubColVec: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) gx.a[i] += g.a[i];
            }
            if (wants(n.in1)) {
                Mat& gv = grad_buf(n.in1);
                for (std::size_t b = 0; b < g.rows; ++b) {
                    const double* gr = g.row(b);
                    double s = 0.0;
                    for (std::size_t j = 0; j < g.cols; ++j) s += gr[j];
                    gv.a[b] -= s;
                }
            }
            break;
        }
        case Op::kAffine: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) gx.a[i] += n.p0 * g.a[i];
            }
            break;
        }
        case Op::kSigmoid: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double y = n.val.a[i];
                    gx.a[i] += g.a[i] * y * (1.0 - y);
                }
            }
            break;
        }
        case Op::kTanh: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double y = n.val.a[i];
                    gx.a[i] += g.a[i] * (1.0 - y * y);
                }
            }
            break;
        }
        case Op::kLog: {
            if (wants(n.in0)) {
                const Mat& xv = nodes_[n.in0].val;
                Mat& gx = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) gx.a[i] += g.a[i] / xv.a[i];
            }
            break;
        }
        case Op::kAbs: {
            if (wants(n.in0)) {
                const Mat& xv = nodes_[n.in0].val;
                Mat& gx = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double x = xv.a[i];
                    gx.a[i] += g.a[i] * (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
                }
            }
            break;
        }
        case Op::kClamp: {
            if (wants(n.in0)) {
                const Mat& xv = nodes_[n.in0].val;
                Mat& gx = grad_buf(n.in0);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    if (xv.a[i] >= n.p0 && xv.a[i] <= n.p1) gx.a[i] += g.a[i];
                }
            }
            break;
        }
        case Op::kSliceCols: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                for (std::size_t b = 0; b < g.rows; ++b) {
                    const double* gr = g.row(b);
                    double* gxr = gx.row(b);
                    for (std::size_t j = 0; j < g.cols; ++j) gxr[n.u0 + j] += gr[j];
                }
            }
            break;
        }
        case Op::kConcatCols: {
            std::size_t off = 0;
            for (std::uint32_t p = 0; p < n.aux_count; ++p) {
                const std::uint32_t in = aux_[n.aux_begin + p];
                const std::size_t w = nodes_[in].val.cols;
                if (wants(in)) {
                    Mat& gp = grad_buf(in);
                    for (std::size_t b = 0; b < g.rows; ++b) {
                        const double* gr = g.row(b) + off;
                        double* gpr = gp.row(b);
                        for (std::size_t j = 0; j < w; ++j) gpr[j] += gr[j];
                    }
                }
                off += w;
            }
            break;
        }
        case Op::kRowMean: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                const double inv = 1.0 / static_cast<double>(gx.cols);
                for (std::size_t b = 0; b < gx.rows; ++b) {
                    const double gb = g.a[b] * inv;
                    double* gxr = gx.row(b);
                    for (std::size_t j = 0; j < gx.cols; ++j) gxr[j] += gb;
                }
            }
            break;
        }
        case Op::kColMean: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                const double inv = 1.0 / static_cast<double>(gx.rows);
                for (std::size_t b = 0; b < gx.rows; ++b) {
                    double* gxr = gx.row(b);
                    for (std::size_t j = 0; j < gx.cols; ++j) gxr[j] += g.a[j] * inv;
                }
            }
            break;
        }
        case Op::kMeanAll: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                const double gv = g.a[0] / static_cast<double>(gx.size());
                for (double& v : gx.a) v += gv;
            }
            break;
        }
        case Op::kSumAll: {
            if (wants(n.in0)) {
                Mat& gx = grad_buf(n.in0);
                for (double& v : gx.a) v += g.a[0];
            }
            break;
        }
    }
}

const Mat& Graph::gradient(Ref r) const {
    const Node& n = at(r);
    if (n.grad.size() == 0) {
        // Untouched node: materialize its own zero gradient so the returned
        // reference stays valid alongside other gradient() results.
        const_cast<Node&>(n).grad = Mat(n.val.rows, n.val.cols);
    }
    return n.grad;
}

}  // namespace ergan
