#pragma once

#include <functional>
#include <vector>

namespace molcf::ad {

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return a.size(); }
};

// Weighted adjacency rows: nbrs[i] lists (j, w_ij); j may include i itself.
using NeighborLists = std::vector<std::vector<std::pair<int, double>>>;

// Minimal reverse-mode tape over dense matrices. Build a graph of ops, call
// backward(scalar) once; gradients accumulate in grad(id) of every input.
class Tape {
public:
    int input(Mat v);
    const Mat& val(int id) const { return nodes_[id].val; }
    const Mat& grad(int id) const { return nodes_[id].grad; }

    int matmul(int A, int B);
    int add(int A, int B);
    int sub(int A, int B);
    int mul(int A, int B);
    int add_rowvec(int A, int b);   // broadcast 1 x cols over rows of A
    int scale(int A, double s);
    int add_const(int A, double c);
    int tanh_op(int A);
    int softplus_op(int A);
    int log_op(int A);
    int inv_op(int A);
    int square(int A);
    int sum_rows(int A);            // 1 x cols
    // out_i = sum_j w_ij * H_j over the neighbor list of node i.
    int neighbor_sum(int H, const NeighborLists& nbrs);
    // GATv2-style additive attention aggregation with edge weights:
    //   e_ij = sum_h a_h * tanh(S_ih + T_jh),  alpha = softmax_j(e_ij)
    //   out_i = sum_j alpha_ij * w_ij * T_j
    int gat_aggregate(int S, int T, int a, const NeighborLists& nbrs);

    void backward(int scalar_id);
    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Mat val;
        Mat grad;
        std::function<void(Tape&)> back;
    };
    std::vector<Node> nodes_;

    int push(Mat v, std::function<void(Tape&)> back);
    Mat& grad_mut(int id) { return nodes_[id].grad; }
};

}  // namespace molcf::ad
