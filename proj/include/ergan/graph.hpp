#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ergan {

// Minimal row-major dense matrix. Vectors are 1xN or Nx1 matrices.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }
    std::size_t size() const { return a.size(); }
};

// Numerically stable logistic function.
double stable_sigmoid(double x);

// Reverse-mode autodiff tape over matrix-valued nodes. A Graph is built for
// one loss evaluation, backward() is called once on a scalar node, and
// gradients are read back per leaf. Gradient propagation is skipped for
// subgraphs that no differentiable leaf feeds into.
class Graph {
public:
    struct Ref {
        std::uint32_t id = 0;
        std::uint32_t rows = 0, cols = 0;
    };

    // Leaves.
    Ref constant(Mat value);
    Ref constant(std::size_t rows, std::size_t cols, std::span<const double> values);
    Ref scalar_constant(double value);
    Ref leaf(std::size_t rows, std::size_t cols, std::span<const double> values);

    // x (B x I) times w (O x I) transposed -> (B x O).
    Ref linear(Ref x, Ref w);
    Ref add(Ref a, Ref b);
    Ref sub(Ref a, Ref b);
    Ref mul(Ref a, Ref b);  // elementwise
    Ref add_rowvec(Ref x, Ref v);  // v is 1 x N, broadcast over rows
    Ref sub_colvec(Ref x, Ref v);  // v is B x 1, broadcast over columns
    Ref affine(Ref x, double scale, double shift);  // scale*x + shift
    Ref sigmoid(Ref x);
    Ref tanh(Ref x);
    Ref log(Ref x);
    Ref abs(Ref x);
    Ref clamp(Ref x, double lo, double hi);  // zero gradient outside [lo, hi]
    Ref slice_cols(Ref x, std::size_t c0, std::size_t c1);  // columns [c0, c1)
    Ref concat_cols(std::span<const Ref> parts);
    Ref row_mean(Ref x);   // B x N -> B x 1
    Ref col_mean(Ref x);   // B x N -> 1 x N
    Ref mean_all(Ref x);   // -> 1 x 1
    Ref sum_all(Ref x);    // -> 1 x 1

    const Mat& value(Ref r) const;
    double scalar(Ref r) const;  // value of a 1x1 node

    // Reverse pass from a scalar loss node. Throws DataError if loss is not
    // 1x1. May be called once per graph.
    void backward(Ref loss);

    // Gradient of the loss w.r.t. a node (zeros if the node was not reached
    // or does not require grad). Valid after backward().
    const Mat& gradient(Ref r) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        kConst, kLeaf, kLinear, kAdd, kSub, kMul, kAddRowVec, kSubColVec,
        kAffine, kSigmoid, kTanh, kLog, kAbs, kClamp, kSliceCols, kConcatCols,
        kRowMean, kColMean, kMeanAll, kSumAll,
    };
    struct Node {
        Op op;
        bool needs_grad = false;
        std::uint32_t in0 = 0, in1 = 0;
        std::size_t u0 = 0, u1 = 0;        // integer op params (slice bounds)
        double p0 = 0.0, p1 = 0.0;         // real op params (affine, clamp)
        std::uint32_t aux_begin = 0, aux_count = 0;  // concat inputs
        Mat val;
        Mat grad;
    };

    Ref push(Node n);
    Node& at(Ref r) { return nodes_[r.id]; }
    const Node& at(Ref r) const { return nodes_[r.id]; }
    Mat& grad_buf(std::uint32_t id);
    void backprop_node(std::uint32_t id);

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> aux_;
    bool ran_backward_ = false;
};

}  // namespace ergan
