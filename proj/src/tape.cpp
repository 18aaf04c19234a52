#include "molcf/tape.hpp"

#include <cassert>
#include <cmath>

namespace molcf::ad {

int Tape::push(Mat v, std::function<void(Tape&)> back) {
    Node n;
    n.grad = Mat(v.rows, v.cols);
    n.val = std::move(v);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(Mat v) { return push(std::move(v), nullptr); }

int Tape::matmul(int A, int B) {
    const Mat& a = val(A);
    const Mat& b = val(B);
    assert(a.cols == b.rows);
    Mat out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            double av = a.at(i, k);
            if (av == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += av * b.at(k, j);
        }
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, B, id](Tape& t) {
        const Mat& g = t.grad(id);
        const Mat& a = t.val(A);
        const Mat& b = t.val(B);
        Mat& ga = t.grad_mut(A);
        Mat& gb = t.grad_mut(B);
        // dA = g * B^T
        for (int i = 0; i < a.rows; ++i)
            for (int j = 0; j < b.cols; ++j) {
                double gv = g.at(i, j);
                if (gv == 0.0) continue;
                for (int k = 0; k < a.cols; ++k) ga.at(i, k) += gv * b.at(k, j);
            }
        // dB = A^T * g
        for (int i = 0; i < a.rows; ++i)
            for (int k = 0; k < a.cols; ++k) {
                double av = a.at(i, k);
                if (av == 0.0) continue;
                for (int j = 0; j < b.cols; ++j) gb.at(k, j) += av * g.at(i, j);
            }
    };
    return id;
}

int Tape::add(int A, int B) {
    Mat out = val(A);
    const Mat& b = val(B);
    for (std::size_t k = 0; k < out.size(); ++k) out.a[k] += b.a[k];
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, B, id](Tape& t) {
        const Mat& g = t.grad(id);
        Mat& ga = t.grad_mut(A);
        Mat& gb = t.grad_mut(B);
        for (std::size_t k = 0; k < g.size(); ++k) {
            ga.a[k] += g.a[k];
            gb.a[k] += g.a[k];
        }
    };
    return id;
}

int Tape::sub(int A, int B) {
    Mat out = val(A);
    const Mat& b = val(B);
    for (std::size_t k = 0; k < out.size(); ++k) out.a[k] -= b.a[k];
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, B, id](Tape& t) {
        const Mat& g = t.grad(id);
        Mat& ga = t.grad_mut(A);
        Mat& gb = t.grad_mut(B);
        for (std::size_t k = 0; k < g.size(); ++k) {
            ga.a[k] += g.a[k];
            gb.a[k] -= g.a[k];
        }
    };
    return id;
}

int Tape::mul(int A, int B) {
    Mat out = val(A);
    const Mat& b = val(B);
    for (std::size_t k = 0; k < out.size(); ++k) out.a[k] *= b.a[k];
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, B, id](Tape& t) {
        const Mat& g = t.grad(id);
        const Mat& a = t.val(A);
        const Mat& b = t.val(B);
        Mat& ga = t.grad_mut(A);
        Mat& gb = t.grad_mut(B);
        for (std::size_t k = 0; k < g.size(); ++k) {
            ga.a[k] += g.a[k] * b.a[k];
            gb.a[k] += g.a[k] * a.a[k];
        }
    };
    return id;
}

int Tape::add_rowvec(int A, int b) {
    Mat out = val(A);
    const Mat& bias = val(b);
    assert(bias.rows == 1 && bias.cols == out.cols);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out.at(i, j) += bias.at(0, j);
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, b, id](Tape& t) {
        const Mat& g = t.grad(id);
        Mat& ga = t.grad_mut(A);
        Mat& gb = t.grad_mut(b);
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) {
                ga.at(i, j) += g.at(i, j);
                gb.at(0, j) += g.at(i, j);
            }
    };
    return id;
}

int Tape::scale(int A, double s) {
    Mat out = val(A);
    for (double& x : out.a) x *= s;
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, s, id](Tape& t) {
        const Mat& g = t.grad(id);
        Mat& ga = t.grad_mut(A);
        for (std::size_t k = 0; k < g.size(); ++k) ga.a[k] += s * g.a[k];
    };
    return id;
}

int Tape::add_const(int A, double c) {
    Mat out = val(A);
    for (double& x : out.a) x += c;
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, id](Tape& t) {
        const Mat& g = t.grad(id);
        Mat& ga = t.grad_mut(A);
        for (std::size_t k = 0; k < g.size(); ++k) ga.a[k] += g.a[k];
    };
    return id;
}

int Tape::tanh_op(int A) {
    Mat out = val(A);
    for (double& x : out.a) x = std::tanh(x);
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, id](Tape& t) {
        const Mat& g = t.grad(id);
        const Mat& y = t.val(id);
        Mat& ga = t.grad_mut(A);
        for (std::size_t k = 0; k < g.size(); ++k) ga.a[k] += g.a[k] * (1.0 - y.a[k] * y.a[k]);
    };
    return id;
}

int Tape::softplus_op(int A) {
    Mat out = val(A);
    for (double& x : out.a) x = x > 30.0 ? x : std::log1p(std::exp(x));
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, id](Tape& t) {
        const Mat& g = t.grad(id);
        const Mat& x = t.val(A);
        Mat& ga = t.grad_mut(A);
        for (std::size_t k = 0; k < g.size(); ++k)
            ga.a[k] += g.a[k] / (1.0 + std::exp(-x.a[k]));
    };
    return id;
}

int Tape::log_op(int A) {
    Mat out = val(A);
    for (double& x : out.a) x = std::log(x);
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, id](Tape& t) {
        const Mat& g = t.grad(id);
        const Mat& x = t.val(A);
        Mat& ga = t.grad_mut(A);
        for (std::size_t k = 0; k < g.size(); ++k) ga.a[k] += g.a[k] / x.a[k];
    };
    return id;
}

int Tape::inv_op(int A) {
    Mat out = val(A);
    for (double& x : out.a) x = 1.0 / x;
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, id](Tape& t) {
        const Mat& g = t.grad(id);
        const Mat& y = t.val(id);
        Mat& ga = t.grad_mut(A);
        for (std::size_t k = 0; k < g.size(); ++k) ga.a[k] -= g.a[k] * y.a[k] * y.a[k];
    };
    return id;
}

int Tape::square(int A) {
    Mat out = val(A);
    for (double& x : out.a) x *= x;
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, id](Tape& t) {
        const Mat& g = t.grad(id);
        const Mat& x = t.val(A);
        Mat& ga = t.grad_mut(A);
        for (std::size_t k = 0; k < g.size(); ++k) ga.a[k] += 2.0 * g.a[k] * x.a[k];
    };
    return id;
}

int Tape::sum_rows(int A) {
    const Mat& a = val(A);
    Mat out(1, a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) out.at(0, j) += a.at(i, j);
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [A, id](Tape& t) {
        const Mat& g = t.grad(id);
        Mat& ga = t.grad_mut(A);
        for (int i = 0; i < ga.rows; ++i)
            for (int j = 0; j < ga.cols; ++j) ga.at(i, j) += g.at(0, j);
    };
    return id;
}

int Tape::neighbor_sum(int H, const NeighborLists& nbrs) {
    const Mat& h = val(H);
    Mat out(static_cast<int>(nbrs.size()), h.cols);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
        for (auto [j, w] : nbrs[i])
            for (int c = 0; c < h.cols; ++c) out.at(static_cast<int>(i), c) += w * h.at(j, c);
    int id = push(std::move(out), nullptr);
    nodes_[id].back = [H, id, &nbrs](Tape& t) {
        const Mat& g = t.grad(id);
        Mat& gh = t.grad_mut(H);
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (auto [j, w] : nbrs[i])
                for (int c = 0; c < g.cols; ++c)
                    gh.at(j, c) += w * g.at(static_cast<int>(i), c);
    };
    return id;
}

int Tape::gat_aggregate(int S, int T, int a, const NeighborLists& nbrs) {
    const Mat& s = val(S);
    const Mat& tv = val(T);
    const Mat& av = val(a);
    const int hdim = s.cols;
    const int n = static_cast<int>(nbrs.size());
    assert(av.rows == 1 && av.cols == hdim);

    std::vector<std::vector<double>> alphas(n);
    Mat out(n, hdim);
    for (int i = 0; i < n; ++i) {
        const auto& row = nbrs[i];
        std::vector<double> e(row.size());
        double emax = -1e300;
        for (std::size_t k = 0; k < row.size(); ++k) {
            int j = row[k].first;
            double score = 0.0;
            for (int h = 0; h < hdim; ++h)
                score += av.at(0, h) * std::tanh(s.at(i, h) + tv.at(j, h));
            e[k] = score;
            if (score > emax) emax = score;
        }
        double denom = 0.0;
        for (double& x : e) {
            x = std::exp(x - emax);
            denom += x;
        }
        alphas[i].resize(row.size());
        for (std::size_t k = 0; k < row.size(); ++k) {
            double alpha = e[k] / denom;
            alphas[i][k] = alpha;
            int j = row[k].first;
            double w = row[k].second;
            for (int h = 0; h < hdim; ++h) out.at(i, h) += alpha * w * tv.at(j, h);
        }
    }

    int id = push(std::move(out), nullptr);
    nodes_[id].back = [S, T, a, id, &nbrs, alphas = std::move(alphas)](Tape& t) {
        const Mat& g = t.grad(id);
        const Mat& s = t.val(S);
        const Mat& tv = t.val(T);
        const Mat& av = t.val(a);
        Mat& gs = t.grad_mut(S);
        Mat& gt = t.grad_mut(T);
        Mat& ga = t.grad_mut(a);
        const int hdim = s.cols;
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            const auto& row = nbrs[i];
            std::vector<double> d(row.size());
            double dsum = 0.0;
            for (std::size_t k = 0; k < row.size(); ++k) {
                int j = row[k].first;
                double w = row[k].second;
                double dij = 0.0;
                for (int h = 0; h < hdim; ++h)
                    dij += g.at(static_cast<int>(i), h) * w * tv.at(j, h);
                d[k] = dij;
                dsum += alphas[i][k] * dij;
            }
            for (std::size_t k = 0; k < row.size(); ++k) {
                int j = row[k].first;
                double w = row[k].second;
                double alpha = alphas[i][k];
                // value path
                for (int h = 0; h < hdim; ++h)
                    gt.at(j, h) += alpha * w * g.at(static_cast<int>(i), h);
                // attention path through softmax
                double q = alpha * (d[k] - dsum);
                if (q == 0.0) continue;
                for (int h = 0; h < hdim; ++h) {
                    double u = std::tanh(s.at(static_cast<int>(i), h) + tv.at(j, h));
                    ga.at(0, h) += q * u;
                    double dz = q * av.at(0, h) * (1.0 - u * u);
                    gs.at(static_cast<int>(i), h) += dz;
                    gt.at(j, h) += dz;
                }
            }
        }
    };
    return id;
}

void Tape::backward(int scalar_id) {
    assert(val(scalar_id).rows == 1 && val(scalar_id).cols == 1);
    for (auto& n : nodes_)
        for (double& g : n.grad.a) g = 0.0;
    nodes_[scalar_id].grad.at(0, 0) = 1.0;
    for (int id = scalar_id; id >= 0; --id)
        if (nodes_[id].back) nodes_[id].back(*this);
}

}  // namespace molcf::ad
