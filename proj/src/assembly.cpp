#include "chnsd/assembly.hpp"

#include <cstdlib>
#include <thread>

namespace chnsd {

int assembly_threads() {
    static const int n = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (const char* env = std::getenv("CHNSD_THREADS")) {
            const int cap = std::atoi(env);
            if (cap >= 1 && cap < hw) hw = cap;
        }
        return hw;
    }();
    return n;
}

std::array<double, 3> barycentric_of(const Mesh& mesh, int tri, const Vec2& x) {
    const auto c = mesh.tri_coords(tri);
    const Mat2 jinv = mesh.jinv_t[tri].transpose();
    const Vec2 ref = jinv * (x - c[0]);
    return {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
}

namespace {

EdgeQuadCtx make_edge_ctx(const Mesh& mesh, int edge, int qp, double s) {
    const InterfaceEdge& e = mesh.interface_edges[edge];
    EdgeQuadCtx ctx;
    ctx.edge = edge;
    ctx.qp = qp;
    ctx.x = mesh.nodes[e.a] + s * (mesh.nodes[e.b] - mesh.nodes[e.a]);
    ctx.normal_c = e.normal_c;
    ctx.tri_c = e.tri_c;
    ctx.tri_m = e.tri_m;
    ctx.bary_c = barycentric_of(mesh, e.tri_c, ctx.x);
    ctx.bary_m = barycentric_of(mesh, e.tri_m, ctx.x);
    return ctx;
}

/// Runs fn(t) over all triangles covered by `filter`, each worker collecting
/// triplets for a contiguous range; buffers are concatenated in range order so
/// the result is independent of the worker count.
template <typename CellFn>
std::vector<Triplet> parallel_cells(const Mesh& mesh, const std::function<bool(int)>& filter, CellFn fn) {
    std::vector<int> tris;
    tris.reserve(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t)
        if (filter(t)) tris.push_back(t);

    const int nw = std::min<int>(assembly_threads(), std::max<std::size_t>(tris.size() / 64, 1));
    std::vector<std::vector<Triplet>> buffers(nw);
    auto work = [&](int w) {
        const std::size_t lo = tris.size() * w / nw, hi = tris.size() * (w + 1) / nw;
        for (std::size_t i = lo; i < hi; ++i) fn(tris[i], buffers[w]);
    };
    if (nw == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    std::vector<Triplet> all;
    std::size_t total = 0;
    for (const auto& b : buffers) total += b.size();
    all.reserve(total);
    for (const auto& b : buffers) all.insert(all.end(), b.begin(), b.end());
    return all;
}

} // namespace

std::vector<Triplet> assemble_cells(const Mesh& mesh, const std::function<bool(int)>& filter,
                                    const std::function<void(int, std::vector<Triplet>&)>& cell) {
    return parallel_cells(mesh, filter, [&](int t, std::vector<Triplet>& out) { cell(t, out); });
}

namespace {

struct CellData {
    int n_trial_shapes, n_test_shapes;
    int trial_dofs[12], test_dofs[12];
    double w;             // physical quadrature weight
    QuadCtx ctx;
    const std::array<double, 6>* trial_vals;
    const std::array<double, 6>* test_vals;
    Vec2 trial_grads[6], test_grads[6]; // physical gradients
};

bool domain_compatible(const FunctionSpace& a, const FunctionSpace& b) {
    if (a.region == b.region) return true;
    return a.region == SpaceRegion::whole || b.region == SpaceRegion::whole;
}

std::function<bool(int)> intersection_filter(const FunctionSpace& trial, const FunctionSpace& test) {
    return [&trial, &test](int t) { return trial.covers_tri(t) && test.covers_tri(t); };
}

} // namespace

CsrMatrix assemble_operator(OperatorKind kind, const FunctionSpace& trial, const FunctionSpace& test,
                            const Coefficients& coeffs) {
    const Mesh& mesh = *trial.mesh;
    if (test.mesh != trial.mesh) throw AssemblyError("trial and test spaces live on different meshes");

    const bool edge_kind = kind == OperatorKind::interface_normal || kind == OperatorKind::interface_bjs ||
                           kind == OperatorKind::interface_scalar;

    if (!edge_kind) {
        if (!domain_compatible(trial, test)) throw AssemblyError("trial/test regions do not overlap");
        const bool want_vector_pair = kind == OperatorKind::symmetric_gradient || kind == OperatorKind::convection ||
                                      kind == OperatorKind::div_advect || kind == OperatorKind::grad_div;
        if (want_vector_pair && (!trial.is_vector_space() || !test.is_vector_space()))
            throw AssemblyError("operator requires vector trial and test spaces");
        if (kind == OperatorKind::divergence && trial.is_vector_space() == test.is_vector_space())
            throw AssemblyError("divergence couples a vector space with a scalar space");
        if (kind == OperatorKind::stiffness && (trial.is_vector_space() || test.is_vector_space()))
            throw AssemblyError("stiffness expects scalar spaces");
        if (kind == OperatorKind::mass && trial.is_vector_space() != test.is_vector_space())
            throw AssemblyError("mass expects spaces of the same rank");
        if (kind == OperatorKind::convection && !coeffs.velocity)
            throw AssemblyError("convection needs an advecting velocity coefficient");
        if (kind == OperatorKind::gradient_coupling && (trial.is_vector_space() || !test.is_vector_space()))
            throw AssemblyError("gradient_coupling couples a scalar trial with a vector test space");

        const QuadRule& rule = assembly_rule();
        const BasisTable trial_tab = tabulate_basis(trial.element, rule);
        const BasisTable test_tab = tabulate_basis(test.element, rule);
        const int nlt = trial.local_dofs(), nls = test.local_dofs();

        auto cell = [&](int t, std::vector<Triplet>& out) {
            CellData d;
            d.n_trial_shapes = trial_tab.n_shapes;
            d.n_test_shapes = test_tab.n_shapes;
            trial.cell_dofs(t, {d.trial_dofs, static_cast<std::size_t>(nlt)});
            test.cell_dofs(t, {d.test_dofs, static_cast<std::size_t>(nls)});
            const Mat2& jt = mesh.jinv_t[t];
            double elem[12][12] = {};

            for (int q = 0; q < rule.n_points(); ++q) {
                d.ctx = {t, q, rule.points[q], mesh.point_of(t, rule.points[q]), mesh.region[t]};
                d.w = 2.0 * mesh.tri_area[t] * rule.weights[q];
                d.trial_vals = &trial_tab.values[q];
                d.test_vals = &test_tab.values[q];
                for (int k = 0; k < d.n_trial_shapes; ++k) d.trial_grads[k] = jt * trial_tab.ref_grads[q][k];
                for (int k = 0; k < d.n_test_shapes; ++k) d.test_grads[k] = jt * test_tab.ref_grads[q][k];

                switch (kind) {
                case OperatorKind::mass: {
                    const double c = coeffs.scalar ? coeffs.scalar(d.ctx) : 1.0;
                    if (!trial.is_vector_space()) {
                        for (int i = 0; i < d.n_test_shapes; ++i)
                            for (int j = 0; j < d.n_trial_shapes; ++j)
                                elem[i][j] += d.w * c * (*d.test_vals)[i] * (*d.trial_vals)[j];
                    } else {
                        for (int i = 0; i < d.n_test_shapes; ++i)
                            for (int j = 0; j < d.n_trial_shapes; ++j) {
                                const double v = d.w * c * (*d.test_vals)[i] * (*d.trial_vals)[j];
                                elem[2 * i][2 * j] += v;
                                elem[2 * i + 1][2 * j + 1] += v;
                            }
                    }
                    break;
                }
                case OperatorKind::stiffness: {
                    const Mat2 A = coeffs.tensor ? coeffs.tensor(d.ctx) : Mat2::Identity();
                    Vec2 Ag[6];
                    for (int j = 0; j < d.n_trial_shapes; ++j) Ag[j] = A * d.trial_grads[j];
                    for (int i = 0; i < d.n_test_shapes; ++i)
                        for (int j = 0; j < d.n_trial_shapes; ++j)
                            elem[i][j] += d.w * d.test_grads[i].dot(Ag[j]);
                    break;
                }
                case OperatorKind::symmetric_gradient: {
                    const double c = coeffs.scalar ? coeffs.scalar(d.ctx) : 1.0;
                    for (int i = 0; i < d.n_test_shapes; ++i)
                        for (int j = 0; j < d.n_trial_shapes; ++j) {
                            const double gg = d.trial_grads[j].dot(d.test_grads[i]);
                            for (int ci = 0; ci < 2; ++ci)
                                for (int cj = 0; cj < 2; ++cj) {
                                    const double dij = 0.5 * ((ci == cj ? gg : 0.0) +
                                                              d.trial_grads[j][ci] * d.test_grads[i][cj]);
                                    elem[2 * i + ci][2 * j + cj] += d.w * c * dij;
                                }
                        }
                    break;
                }
                case OperatorKind::divergence: {
                    const double c = coeffs.scalar ? coeffs.scalar(d.ctx) : 1.0;
                    if (test.is_vector_space()) { // (c q, div v): trial scalar, test vector
                        for (int i = 0; i < d.n_test_shapes; ++i)
                            for (int j = 0; j < d.n_trial_shapes; ++j)
                                for (int ci = 0; ci < 2; ++ci)
                                    elem[2 * i + ci][j] += d.w * c * (*d.trial_vals)[j] * d.test_grads[i][ci];
                    } else {
                        for (int i = 0; i < d.n_test_shapes; ++i)
                            for (int j = 0; j < d.n_trial_shapes; ++j)
                                for (int cj = 0; cj < 2; ++cj)
                                    elem[i][2 * j + cj] += d.w * c * (*d.test_vals)[i] * d.trial_grads[j][cj];
                    }
                    break;
                }
                case OperatorKind::convection: {
                    const double c = coeffs.scalar ? coeffs.scalar(d.ctx) : 1.0;
                    const Vec2 a = coeffs.velocity(d.ctx);
                    for (int j = 0; j < d.n_trial_shapes; ++j) {
                        const double adg = a.dot(d.trial_grads[j]);
                        for (int i = 0; i < d.n_test_shapes; ++i) {
                            const double v = d.w * c * adg * (*d.test_vals)[i];
                            elem[2 * i][2 * j] += v;
                            elem[2 * i + 1][2 * j + 1] += v;
                        }
                    }
                    break;
                }
                case OperatorKind::div_advect: {
                    const double c = coeffs.scalar ? coeffs.scalar(d.ctx) : 1.0;
                    for (int i = 0; i < d.n_test_shapes; ++i)
                        for (int j = 0; j < d.n_trial_shapes; ++j) {
                            const double v = d.w * c * (*d.test_vals)[i] * (*d.trial_vals)[j];
                            elem[2 * i][2 * j] += v;
                            elem[2 * i + 1][2 * j + 1] += v;
                        }
                    break;
                }
                case OperatorKind::grad_div: {
                    const double c = coeffs.scalar ? coeffs.scalar(d.ctx) : 1.0;
                    for (int i = 0; i < d.n_test_shapes; ++i)
                        for (int j = 0; j < d.n_trial_shapes; ++j)
                            for (int ci = 0; ci < 2; ++ci)
                                for (int cj = 0; cj < 2; ++cj)
                                    elem[2 * i + ci][2 * j + cj] +=
                                        d.w * c * d.trial_grads[j][cj] * d.test_grads[i][ci];
                    break;
                }
                case OperatorKind::gradient_coupling: {
                    const double c = coeffs.scalar ? coeffs.scalar(d.ctx) : 1.0;
                    for (int i = 0; i < d.n_test_shapes; ++i)
                        for (int j = 0; j < d.n_trial_shapes; ++j)
                            for (int ci = 0; ci < 2; ++ci)
                                elem[2 * i + ci][j] += d.w * c * d.trial_grads[j][ci] * (*d.test_vals)[i];
                    break;
                }
                default: break;
                }
            }
            // keep exact zeros: downstream factorization caches rely on
            // patterns that do not change with the coefficient data
            for (int i = 0; i < nls; ++i)
                for (int j = 0; j < nlt; ++j) out.push_back({d.test_dofs[i], d.trial_dofs[j], elem[i][j]});
        };

        auto trips = parallel_cells(mesh, intersection_filter(trial, test), cell);
        return csr_from_triplets(test.n_dofs, trial.n_dofs, std::move(trips));
    }

    // interface kinds
    const FunctionSpace* vec_space = nullptr;
    const FunctionSpace* sca_space = nullptr;
    if (kind == OperatorKind::interface_normal) {
        if (trial.is_vector_space() == test.is_vector_space())
            throw AssemblyError("interface_normal couples a conduit vector space with a matrix scalar space");
        vec_space = trial.is_vector_space() ? &trial : &test;
        sca_space = trial.is_vector_space() ? &test : &trial;
        if (vec_space->region != SpaceRegion::conduit || sca_space->region == SpaceRegion::conduit)
            throw AssemblyError("interface_normal needs a conduit vector space and a matrix-side scalar space");
    } else {
        if (!trial.is_vector_space() || !test.is_vector_space() || trial.region != SpaceRegion::conduit ||
            test.region != SpaceRegion::conduit)
            throw AssemblyError("BJS/interface_scalar act on the conduit velocity space");
        if (kind == OperatorKind::interface_scalar && !coeffs.edge_velocity)
            throw AssemblyError("interface_scalar needs the interface advection coefficient");
    }

    const QuadRule& rule = assembly_rule();
    std::vector<Triplet> trips;
    std::array<double, 6> vvals{}, svals{};
    std::array<Vec2, 6> grads_unused{};
    for (int e = 0; e < static_cast<int>(mesh.interface_edges.size()); ++e) {
        const InterfaceEdge& ie = mesh.interface_edges[e];
        const double len = (mesh.nodes[ie.b] - mesh.nodes[ie.a]).norm();
        for (int q = 0; q < rule.n_edge_points(); ++q) {
            const EdgeQuadCtx ctx = make_edge_ctx(mesh, e, q, rule.edge_points[q]);
            const double w = rule.edge_weights[q] * len;

            if (kind == OperatorKind::interface_normal) {
                eval_basis(vec_space->element, ctx.bary_c, vvals, grads_unused);
                const auto& bary_s = sca_space->region == SpaceRegion::matrix ? ctx.bary_m : ctx.bary_c;
                const int tri_s = sca_space->region == SpaceRegion::matrix ? ctx.tri_m : ctx.tri_c;
                eval_basis(sca_space->element, bary_s, svals, grads_unused);
                int vdofs[12], sdofs[6];
                vec_space->cell_dofs(ctx.tri_c, {vdofs, static_cast<std::size_t>(vec_space->local_dofs())});
                sca_space->cell_dofs(tri_s, {sdofs, static_cast<std::size_t>(sca_space->local_dofs())});
                const int nv = scalar_shape_count(vec_space->element);
                const int ns = scalar_shape_count(sca_space->element);
                const bool vec_is_test = test.is_vector_space();
                for (int sv = 0; sv < nv; ++sv)
                    for (int c = 0; c < 2; ++c) {
                        const double vn = vvals[sv] * ctx.normal_c[c];
                        if (vn == 0.0) continue;
                        for (int ss = 0; ss < ns; ++ss) {
                            const double v = w * vn * svals[ss];
                            if (vec_is_test)
                                trips.push_back({vdofs[2 * sv + c], sdofs[ss], v});
                            else
                                trips.push_back({sdofs[ss], vdofs[2 * sv + c], v});
                        }
                    }
            } else {
                eval_basis(trial.element, ctx.bary_c, vvals, grads_unused);
                int dofs[12];
                trial.cell_dofs(ctx.tri_c, {dofs, static_cast<std::size_t>(trial.local_dofs())});
                const int n = scalar_shape_count(trial.element);
                if (kind == OperatorKind::interface_bjs) {
                    const double c = coeffs.edge_scalar ? coeffs.edge_scalar(ctx) : 1.0;
                    // tangential product: tau = (1, 0), only x-components couple
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            trips.push_back({dofs[2 * i], dofs[2 * j], w * c * vvals[i] * vvals[j]});
                } else { // interface_scalar
                    const Vec2 b = coeffs.edge_velocity(ctx);
                    for (int i = 0; i < n; ++i)
                        for (int ci = 0; ci < 2; ++ci) {
                            const double tn = vvals[i] * ctx.normal_c[ci];
                            if (tn == 0.0) continue;
                            for (int j = 0; j < n; ++j)
                                for (int cj = 0; cj < 2; ++cj)
                                    trips.push_back({dofs[2 * i + ci], dofs[2 * j + cj],
                                                     0.5 * w * tn * b[cj] * vvals[j]});
                        }
                }
            }
        }
    }
    return csr_from_triplets(test.n_dofs, trial.n_dofs, std::move(trips));
}

namespace {

template <typename Kernel>
Vector domain_load(const FunctionSpace& space, std::optional<Region> region, Kernel kernel) {
    const Mesh& mesh = *space.mesh;
    const QuadRule& rule = assembly_rule();
    const BasisTable tab = tabulate_basis(space.element, rule);
    const int nl = space.local_dofs();
    Vector out = Vector::Zero(space.n_dofs);

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (!space.covers_tri(t)) continue;
        if (region && mesh.region[t] != *region) continue;
        int dofs[12];
        space.cell_dofs(t, {dofs, static_cast<std::size_t>(nl)});
        const Mat2& jt = mesh.jinv_t[t];
        for (int q = 0; q < rule.n_points(); ++q) {
            const QuadCtx ctx{t, q, rule.points[q], mesh.point_of(t, rule.points[q]), mesh.region[t]};
            const double w = 2.0 * mesh.tri_area[t] * rule.weights[q];
            kernel(ctx, w, tab.values[q], tab.ref_grads[q], jt, dofs, out);
        }
    }
    return out;
}

} // namespace

Vector assemble_load_scalar(const FunctionSpace& space, const ScalarCoeff& f, std::optional<Region> region) {
    if (space.is_vector_space()) throw AssemblyError("scalar load on vector space");
    return domain_load(space, region,
                       [&](const QuadCtx& ctx, double w, const std::array<double, 6>& vals,
                           const std::array<Vec2, 6>&, const Mat2&, const int* dofs, Vector& out) {
                           const double fv = f(ctx);
                           for (int k = 0; k < scalar_shape_count(space.element); ++k)
                               out[dofs[k]] += w * fv * vals[k];
                       });
}

Vector assemble_load_vector(const FunctionSpace& space, const VectorCoeff& f, std::optional<Region> region) {
    if (!space.is_vector_space()) throw AssemblyError("vector load on scalar space");
    return domain_load(space, region,
                       [&](const QuadCtx& ctx, double w, const std::array<double, 6>& vals,
                           const std::array<Vec2, 6>&, const Mat2&, const int* dofs, Vector& out) {
                           const Vec2 fv = f(ctx);
                           for (int k = 0; k < scalar_shape_count(space.element); ++k) {
                               out[dofs[2 * k]] += w * fv.x() * vals[k];
                               out[dofs[2 * k + 1]] += w * fv.y() * vals[k];
                           }
                       });
}

Vector assemble_load_gradient(const FunctionSpace& space, const VectorCoeff& g, std::optional<Region> region) {
    if (space.is_vector_space()) throw AssemblyError("gradient load on vector space");
    return domain_load(space, region,
                       [&](const QuadCtx& ctx, double w, const std::array<double, 6>&,
                           const std::array<Vec2, 6>& rg, const Mat2& jt, const int* dofs, Vector& out) {
                           const Vec2 gv = g(ctx);
                           for (int k = 0; k < scalar_shape_count(space.element); ++k)
                               out[dofs[k]] += w * gv.dot(jt * rg[k]);
                       });
}

Vector assemble_load_divergence(const FunctionSpace& space, const ScalarCoeff& g, std::optional<Region> region) {
    if (!space.is_vector_space()) throw AssemblyError("divergence load on scalar space");
    return domain_load(space, region,
                       [&](const QuadCtx& ctx, double w, const std::array<double, 6>&,
                           const std::array<Vec2, 6>& rg, const Mat2& jt, const int* dofs, Vector& out) {
                           const double gv = g(ctx);
                           for (int k = 0; k < scalar_shape_count(space.element); ++k) {
                               const Vec2 gk = jt * rg[k];
                               out[dofs[2 * k]] += w * gv * gk.x();
                               out[dofs[2 * k + 1]] += w * gv * gk.y();
                           }
                       });
}

Vector assemble_load_tensor(const FunctionSpace& space, const MatrixCoeff& S, std::optional<Region> region) {
    if (!space.is_vector_space()) throw AssemblyError("tensor load needs a vector space");
    return domain_load(space, region,
                       [&](const QuadCtx& ctx, double w, const std::array<double, 6>&,
                           const std::array<Vec2, 6>& rg, const Mat2& jt, const int* dofs, Vector& out) {
                           const Mat2 sv = S(ctx);
                           for (int k = 0; k < scalar_shape_count(space.element); ++k) {
                               const Vec2 gk = jt * rg[k];
                               out[dofs[2 * k]] += w * sv.row(0).dot(gk);
                               out[dofs[2 * k + 1]] += w * sv.row(1).dot(gk);
                           }
                       });
}

namespace {

template <typename Kernel>
Vector edge_load(const FunctionSpace& space, Kernel kernel) {
    const Mesh& mesh = *space.mesh;
    const QuadRule& rule = assembly_rule();
    Vector out = Vector::Zero(space.n_dofs);
    std::array<double, 6> vals{};
    std::array<Vec2, 6> grads{};
    for (int e = 0; e < static_cast<int>(mesh.interface_edges.size()); ++e) {
        const InterfaceEdge& ie = mesh.interface_edges[e];
        const double len = (mesh.nodes[ie.b] - mesh.nodes[ie.a]).norm();
        const int tri = space.region == SpaceRegion::matrix ? ie.tri_m : ie.tri_c;
        int dofs[12];
        space.cell_dofs(tri, {dofs, static_cast<std::size_t>(space.local_dofs())});
        for (int q = 0; q < rule.n_edge_points(); ++q) {
            const EdgeQuadCtx ctx = make_edge_ctx(mesh, e, q, rule.edge_points[q]);
            eval_basis(space.element, space.region == SpaceRegion::matrix ? ctx.bary_m : ctx.bary_c, vals, grads);
            kernel(ctx, rule.edge_weights[q] * len, vals, dofs, out);
        }
    }
    return out;
}

} // namespace

Vector assemble_edge_load_scalar(const FunctionSpace& space, const EdgeScalarCoeff& g) {
    if (space.is_vector_space()) throw AssemblyError("scalar edge load on vector space");
    return edge_load(space, [&](const EdgeQuadCtx& ctx, double w, const std::array<double, 6>& vals,
                                const int* dofs, Vector& out) {
        const double gv = g(ctx);
        for (int k = 0; k < scalar_shape_count(space.element); ++k) out[dofs[k]] += w * gv * vals[k];
    });
}

Vector assemble_edge_load_normal(const FunctionSpace& space, const EdgeScalarCoeff& g) {
    if (!space.is_vector_space()) throw AssemblyError("normal edge load needs a vector space");
    return edge_load(space, [&](const EdgeQuadCtx& ctx, double w, const std::array<double, 6>& vals,
                                const int* dofs, Vector& out) {
        const double gv = g(ctx);
        for (int k = 0; k < scalar_shape_count(space.element); ++k) {
            out[dofs[2 * k]] += w * gv * vals[k] * ctx.normal_c.x();
            out[dofs[2 * k + 1]] += w * gv * vals[k] * ctx.normal_c.y();
        }
    });
}

Vector assemble_edge_load_vector(const FunctionSpace& space, const EdgeVectorCoeff& g) {
    if (!space.is_vector_space()) throw AssemblyError("vector edge load needs a vector space");
    return edge_load(space, [&](const EdgeQuadCtx& ctx, double w, const std::array<double, 6>& vals,
                                const int* dofs, Vector& out) {
        const Vec2 gv = g(ctx);
        for (int k = 0; k < scalar_shape_count(space.element); ++k) {
            out[dofs[2 * k]] += w * gv.x() * vals[k];
            out[dofs[2 * k + 1]] += w * gv.y() * vals[k];
        }
    });
}

Vector mean_weights(const FunctionSpace& space) {
    if (space.is_vector_space()) throw AssemblyError("mean weights of a vector space");
    return assemble_load_scalar(space, [](const QuadCtx&) { return 1.0; });
}

} // namespace chnsd
