#pragma once

// Hom Lie triple systems, finite group actions and representations, with
// verifiers that check every axiom on basis tuples.

#include "homlts/sparse.hpp"
#include "homlts/tensor.hpp"

#include <sstream>

namespace homlts {

// ---------------------------------------------------------------------------
// Verification reports

struct Violation {
  std::string axiom;
  IndexTuple tuple;  // 0-based basis indices
  Vector lhs;
  Vector rhs;
};

struct VerificationReport {
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }

  void add(std::string axiom, IndexTuple tuple, Vector lhs, Vector rhs) {
    violations.push_back({std::move(axiom), std::move(tuple), std::move(lhs), std::move(rhs)});
  }

  void merge(const VerificationReport& other, const std::string& prefix = {}) {
    for (const auto& v : other.violations) {
      Violation c = v;
      if (!prefix.empty()) c.axiom = prefix + c.axiom;
      violations.push_back(std::move(c));
    }
  }

  bool has(const std::string& axiom) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.axiom == axiom; });
  }

  std::string summary() const {
    if (passed()) return "passed";
    std::ostringstream os;
    const auto& v = violations.front();
    os << violations.size() << " violation(s); first: " << v.axiom << " at (";
    for (std::size_t i = 0; i < v.tuple.size(); ++i) os << (i ? "," : "") << v.tuple[i] + 1;
    os << ")";
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Hom Lie triple system

class HomLts {
 public:
  HomLts() = default;

  /// bracket[((i*n + j)*n + k)*n + l] is the e_l coefficient of [e_i e_j e_k];
  /// twist(i, j) is the e_i coefficient of alpha(e_j).
  HomLts(std::size_t dim, Vector bracket, Matrix twist)
      : dim_(dim), bracket_(std::move(bracket)), twist_(std::move(twist)) {
    require(bracket_.size() == ipow(dim_, 4), "HomLts: bracket tensor must have dim^4 entries");
    require(twist_.rows() == dim_ && twist_.cols() == dim_, "HomLts: twist must be dim x dim");
  }

  static HomLts zero(std::size_t dim, Matrix twist) { return HomLts(dim, Vector(ipow(dim, 4), Scalar(0)), std::move(twist)); }
  static HomLts zero(std::size_t dim) { return zero(dim, Matrix::identity(dim)); }

  std::size_t dim() const { return dim_; }
  const Matrix& twist() const { return twist_; }
  const Vector& structure_constants() const { return bracket_; }
  TensorShape shape() const { return {dim_, 3, dim_}; }

  const Scalar& coeff(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return bracket_[((i * dim_ + j) * dim_ + k) * dim_ + l];
  }
  Scalar& coeff(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return bracket_[((i * dim_ + j) * dim_ + k) * dim_ + l];
  }

  /// [e_i e_j e_k]
  std::span<const Scalar> basis_bracket(std::size_t i, std::size_t j, std::size_t k) const {
    return {bracket_.data() + ((i * dim_ + j) * dim_ + k) * dim_, dim_};
  }

  Vector alpha(std::span<const Scalar> x) const { return twist_.apply(x); }
  Vector alpha_basis(std::size_t i) const { return twist_.column(i); }

  friend bool operator==(const HomLts& a, const HomLts& b) {
    return a.dim_ == b.dim_ && a.bracket_ == b.bracket_ && a.twist_ == b.twist_;
  }

 private:
  std::size_t dim_ = 0;
  Vector bracket_;
  Matrix twist_;
};

inline Vector eval_bracket(const HomLts& t, const Vector& x, const Vector& y, const Vector& z) {
  require(x.size() == t.dim() && y.size() == t.dim() && z.size() == t.dim(),
          "eval_bracket: vectors must have length dim");
  return eval_multilinear(t.structure_constants(), t.shape(), {x, y, z});
}

inline VerificationReport verify_hom_lts(const HomLts& t) {
  VerificationReport rep;
  const std::size_t n = t.dim();
  auto vec = [&](std::span<const Scalar> s) { return Vector(s.begin(), s.end()); };

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        auto ijk = t.basis_bracket(i, j, k);
        if (i == j) {
          if (!is_zero(ijk)) rep.add("alternating", {i, i, k}, vec(ijk), zero_vector(n));
        } else if (i < j) {
          Vector s = add(vec(ijk), t.basis_bracket(j, i, k));
          if (!is_zero(s)) rep.add("alternating", {i, j, k}, vec(ijk), scale(vec(t.basis_bracket(j, i, k)), -1));
        }
        Vector cyc = add(add(vec(ijk), t.basis_bracket(j, k, i)), t.basis_bracket(k, i, j));
        if (!is_zero(cyc)) rep.add("cyclic", {i, j, k}, cyc, zero_vector(n));
      }

  std::vector<Vector> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = t.alpha_basis(i);

  for_each_tuple(n, 3, [&](const IndexTuple& ijk) {
    Vector lhs = t.alpha(t.basis_bracket(ijk[0], ijk[1], ijk[2]));
    Vector rhs = eval_bracket(t, a[ijk[0]], a[ijk[1]], a[ijk[2]]);
    if (lhs != rhs) rep.add("multiplicative", ijk, std::move(lhs), std::move(rhs));
  });

  // [a(a) a(b) [cde]] = [[abc] a(d) a(e)] + [a(c) [abd] a(e)] + [a(c) a(d) [abe]]
  for_each_tuple(n, 5, [&](const IndexTuple& q) {
    const auto [ia, ib, ic, id, ie] = std::tuple{q[0], q[1], q[2], q[3], q[4]};
    Vector cde = vec(t.basis_bracket(ic, id, ie));
    Vector lhs = eval_bracket(t, a[ia], a[ib], cde);
    Vector rhs = eval_bracket(t, vec(t.basis_bracket(ia, ib, ic)), a[id], a[ie]);
    rhs = add(std::move(rhs), eval_bracket(t, a[ic], vec(t.basis_bracket(ia, ib, id)), a[ie]));
    rhs = add(std::move(rhs), eval_bracket(t, a[ic], a[id], vec(t.basis_bracket(ia, ib, ie))));
    if (lhs != rhs) rep.add("hom-jacobi", q, std::move(lhs), std::move(rhs));
  });
  return rep;
}

/// Hom-Lts morphism check: f[abc] = [f a f b f c]' and f alpha = alpha' f.
inline VerificationReport verify_morphism(const Matrix& f, const HomLts& src, const HomLts& dst,
                                          const std::string& name) {
  require(f.rows() == dst.dim() && f.cols() == src.dim(), "verify_morphism: shape mismatch");
  VerificationReport rep;
  const std::size_t n = src.dim();
  std::vector<Vector> fe(n);
  for (std::size_t i = 0; i < n; ++i) fe[i] = f.column(i);
  for_each_tuple(n, 3, [&](const IndexTuple& ijk) {
    Vector lhs = f.apply(src.basis_bracket(ijk[0], ijk[1], ijk[2]));
    Vector rhs = eval_bracket(dst, fe[ijk[0]], fe[ijk[1]], fe[ijk[2]]);
    if (lhs != rhs) rep.add(name + ".bracket", ijk, std::move(lhs), std::move(rhs));
  });
  const Matrix l = f * src.twist();
  const Matrix r = dst.twist() * f;
  if (!(l == r)) rep.add(name + ".twist", {}, l.entries(), r.entries());
  return rep;
}

// ---------------------------------------------------------------------------
// Finite groups and actions

class FiniteGroup {
 public:
  FiniteGroup() = default;

  /// cayley[a*order + b] = index of a*b.
  FiniteGroup(std::vector<std::string> labels, std::vector<std::size_t> cayley, std::size_t identity)
      : labels_(std::move(labels)), cayley_(std::move(cayley)), identity_(identity) {
    const std::size_t n = labels_.size();
    require(n > 0, "FiniteGroup: empty group");
    require(cayley_.size() == n * n, "FiniteGroup: cayley table must be order x order");
    require(identity_ < n, "FiniteGroup: identity index out of range");
    for (auto x : cayley_) require(x < n, "FiniteGroup: cayley entry out of range");
  }

  static FiniteGroup trivial() { return FiniteGroup({"e"}, {0}, 0); }

  static FiniteGroup cyclic(std::size_t k) {
    std::vector<std::string> labels;
    std::vector<std::size_t> table(k * k);
    for (std::size_t a = 0; a < k; ++a) {
      labels.push_back(std::to_string(a));
      for (std::size_t b = 0; b < k; ++b) table[a * k + b] = (a + b) % k;
    }
    return FiniteGroup(std::move(labels), std::move(table), 0);
  }

  std::size_t order() const { return labels_.size(); }
  std::size_t identity() const { return identity_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::size_t>& cayley() const { return cayley_; }
  std::size_t mul(std::size_t a, std::size_t b) const { return cayley_[a * order() + b]; }

  std::optional<std::size_t> inverse(std::size_t a) const {
    for (std::size_t b = 0; b < order(); ++b)
      if (mul(a, b) == identity_ && mul(b, a) == identity_) return b;
    return std::nullopt;
  }

  VerificationReport check_axioms() const {
    VerificationReport rep;
    const std::size_t n = order();
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<bool> row(n, false), col(n, false);
      for (std::size_t b = 0; b < n; ++b) {
        row[mul(a, b)] = true;
        col[mul(b, a)] = true;
      }
      if (std::count(row.begin(), row.end(), true) != static_cast<long>(n) ||
          std::count(col.begin(), col.end(), true) != static_cast<long>(n))
        rep.add("group.latin-square", {a}, {}, {});
      if (mul(identity_, a) != a || mul(a, identity_) != a) rep.add("group.identity", {a}, {}, {});
      if (!inverse(a)) rep.add("group.inverse", {a}, {}, {});
    }
    for_each_tuple(n, 3, [&](const IndexTuple& g) {
      if (mul(mul(g[0], g[1]), g[2]) != mul(g[0], mul(g[1], g[2]))) rep.add("group.associativity", g, {}, {});
    });
    return rep;
  }

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
    return a.labels_ == b.labels_ && a.cayley_ == b.cayley_ && a.identity_ == b.identity_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> cayley_;
  std::size_t identity_ = 0;
};

class GroupAction {
 public:
  GroupAction() = default;
  GroupAction(FiniteGroup group, std::size_t space_dim, std::vector<Matrix> matrices)
      : group_(std::move(group)), space_dim_(space_dim), matrices_(std::move(matrices)) {
    require(matrices_.size() == group_.order(), "GroupAction: one matrix per group element required");
    for (const auto& m : matrices_)
      require(m.rows() == space_dim_ && m.cols() == space_dim_, "GroupAction: matrices must be space_dim square");
  }

  static GroupAction trivial(std::size_t space_dim) {
    return GroupAction(FiniteGroup::trivial(), space_dim, {Matrix::identity(space_dim)});
  }

  /// Same group acting through the scalar multiples sign[g] * I.
  static GroupAction scalar(const FiniteGroup& group, std::size_t space_dim, const Vector& scalars) {
    std::vector<Matrix> ms;
    for (const auto& s : scalars) ms.push_back(Matrix::scalar(space_dim, s));
    return GroupAction(group, space_dim, std::move(ms));
  }

  const FiniteGroup& group() const { return group_; }
  std::size_t space_dim() const { return space_dim_; }
  const Matrix& matrix(std::size_t g) const { return matrices_[g]; }
  const std::vector<Matrix>& matrices() const { return matrices_; }

  friend bool operator==(const GroupAction& a, const GroupAction& b) {
    return a.group_ == b.group_ && a.space_dim_ == b.space_dim_ && a.matrices_ == b.matrices_;
  }

 private:
  FiniteGroup group_;
  std::size_t space_dim_ = 0;
  std::vector<Matrix> matrices_;
};

/// Group axioms, homomorphism and invertibility of the matrices.
inline VerificationReport verify_linear_action(const GroupAction& act) {
  VerificationReport rep = act.group().check_axioms();
  const auto& g = act.group();
  const std::size_t n = act.space_dim();
  if (!(act.matrix(g.identity()) == Matrix::identity(n)))
    rep.add("action.identity", {g.identity()}, act.matrix(g.identity()).entries(), Matrix::identity(n).entries());
  for (std::size_t a = 0; a < g.order(); ++a) {
    if (rank(act.matrix(a)) != n) rep.add("action.invertible", {a}, act.matrix(a).entries(), {});
    for (std::size_t b = 0; b < g.order(); ++b) {
      const Matrix prod = act.matrix(a) * act.matrix(b);
      if (!(act.matrix(g.mul(a, b)) == prod))
        rep.add("action.homomorphism", {a, b}, act.matrix(g.mul(a, b)).entries(), prod.entries());
    }
  }
  return rep;
}

inline VerificationReport verify_group_action(const GroupAction& act, const HomLts& t) {
  require(act.space_dim() == t.dim(), "verify_group_action: action dimension must equal dim T");
  VerificationReport rep = verify_linear_action(act);
  const std::size_t n = t.dim();
  for (std::size_t g = 0; g < act.group().order(); ++g) {
    const Matrix& m = act.matrix(g);
    std::vector<Vector> ge(n);
    for (std::size_t i = 0; i < n; ++i) ge[i] = m.column(i);
    for_each_tuple(n, 3, [&](const IndexTuple& ijk) {
      Vector lhs = eval_bracket(t, ge[ijk[0]], ge[ijk[1]], ge[ijk[2]]);
      Vector rhs = m.apply(t.basis_bracket(ijk[0], ijk[1], ijk[2]));
      if (lhs != rhs) rep.add("action.bracket", {g, ijk[0], ijk[1], ijk[2]}, std::move(lhs), std::move(rhs));
    });
    for (std::size_t i = 0; i < n; ++i) {
      Vector lhs = t.alpha(ge[i]);
      Vector rhs = m.apply(t.alpha_basis(i));
      if (lhs != rhs) rep.add("action.twist", {g, i}, std::move(lhs), std::move(rhs));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Representations

class Representation {
 public:
  Representation() = default;

  /// theta[((i*n + j)*m + p)*m + q] is entry (p, q) of theta(e_i, e_j).
  Representation(std::size_t source_dim, std::size_t target_dim, Vector theta, Matrix a_twist)
      : n_(source_dim), m_(target_dim), theta_(std::move(theta)), a_(std::move(a_twist)) {
    require(theta_.size() == n_ * n_ * m_ * m_, "Representation: theta must have n^2 m^2 entries");
    require(a_.rows() == m_ && a_.cols() == m_, "Representation: A must be m x m");
  }

  static Representation zero(std::size_t source_dim, Matrix a_twist) {
    const std::size_t m = a_twist.rows();
    return Representation(source_dim, m, Vector(source_dim * source_dim * m * m, Scalar(0)), std::move(a_twist));
  }

  std::size_t source_dim() const { return n_; }
  std::size_t target_dim() const { return m_; }
  const Matrix& a_twist() const { return a_; }
  const Vector& theta_tensor() const { return theta_; }

  const Scalar& entry(std::size_t i, std::size_t j, std::size_t p, std::size_t q) const {
    return theta_[((i * n_ + j) * m_ + p) * m_ + q];
  }

  Matrix theta(std::size_t i, std::size_t j) const {
    Matrix r(m_, m_);
    for (std::size_t p = 0; p < m_; ++p)
      for (std::size_t q = 0; q < m_; ++q) r(p, q) = entry(i, j, p, q);
    return r;
  }

  /// theta(x, y) for arbitrary vectors of T.
  Matrix theta(std::span<const Scalar> x, std::span<const Scalar> y) const {
    Matrix r(m_, m_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (sgn(x[i]) == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (sgn(y[j]) == 0) continue;
        const Scalar w = x[i] * y[j];
        for (std::size_t p = 0; p < m_; ++p)
          for (std::size_t q = 0; q < m_; ++q) {
            const Scalar& c = entry(i, j, p, q);
            if (sgn(c) != 0) r(p, q) += w * c;
          }
      }
    }
    return r;
  }

  /// D(x, y) = theta(y, x) - theta(x, y)
  Matrix d(std::span<const Scalar> x, std::span<const Scalar> y) const { return theta(y, x) - theta(x, y); }
  Matrix d(std::size_t i, std::size_t j) const { return theta(j, i) - theta(i, j); }

  bool is_zero() const { return homlts::is_zero(theta_); }

  friend bool operator==(const Representation& a, const Representation& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.theta_ == b.theta_ && a.a_ == b.a_;
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  Vector theta_;
  Matrix a_;
};

inline VerificationReport verify_representation(const HomLts& t, const Representation& rep,
                                                const std::optional<GroupAction>& act_t = std::nullopt,
                                                const std::optional<GroupAction>& act_v = std::nullopt) {
  require(rep.source_dim() == t.dim(), "verify_representation: representation source must be T");
  if (act_t && act_v) require(act_t->group() == act_v->group(), "verify_representation: actions must share one group");
  require(!act_t || act_t->space_dim() == t.dim(), "verify_representation: T action dimension mismatch");
  require(!act_v || act_v->space_dim() == rep.target_dim(), "verify_representation: V action dimension mismatch");

  VerificationReport out;
  const std::size_t n = t.dim();
  const Matrix& a_mat = rep.a_twist();
  std::vector<Vector> al(n);
  for (std::size_t i = 0; i < n; ++i) al[i] = t.alpha_basis(i);
  auto br = [&](std::size_t i, std::size_t j, std::size_t k) {
    auto s = t.basis_bracket(i, j, k);
    return Vector(s.begin(), s.end());
  };

  // theta(alpha a, alpha b) A = A theta(a, b)
  for_each_tuple(n, 2, [&](const IndexTuple& ab) {
    const Matrix lhs = rep.theta(al[ab[0]], al[ab[1]]) * a_mat;
    const Matrix rhs = a_mat * rep.theta(ab[0], ab[1]);
    if (!(lhs == rhs)) out.add("rep.twist", ab, lhs.entries(), rhs.entries());
  });

  for_each_tuple(n, 4, [&](const IndexTuple& q) {
    const std::size_t a = q[0], b = q[1], c = q[2], d = q[3];
    // theta(ac,ad)theta(a,b) - theta(ab,ad)theta(a,c) - theta(aa,[bcd])A + D(ab,ac)theta(a,d) = 0
    Matrix e11 = rep.theta(al[c], al[d]) * rep.theta(a, b) - rep.theta(al[b], al[d]) * rep.theta(a, c) -
                 rep.theta(al[a], br(b, c, d)) * a_mat + rep.d(al[b], al[c]) * rep.theta(a, d);
    if (!e11.is_zero()) out.add("rep.left", q, e11.entries(), Matrix(e11.rows(), e11.cols()).entries());
    // theta(ac,ad)D(a,b) - D(aa,ab)theta(c,d) + theta([abc],ad)A + theta(ac,[abd])A = 0
    Matrix e12 = rep.theta(al[c], al[d]) * rep.d(a, b) - rep.d(al[a], al[b]) * rep.theta(c, d) +
                 rep.theta(br(a, b, c), al[d]) * a_mat + rep.theta(al[c], br(a, b, d)) * a_mat;
    if (!e12.is_zero()) out.add("rep.right", q, e12.entries(), Matrix(e12.rows(), e12.cols()).entries());
  });

  if (act_t && act_v) {
    out.merge(verify_linear_action(*act_v), "v-");
    // theta(ga, gb) g = g theta(a, b) on V
    for (std::size_t g = 0; g < act_t->group().order(); ++g) {
      const Matrix& gt = act_t->matrix(g);
      const Matrix& gv = act_v->matrix(g);
      for_each_tuple(n, 2, [&](const IndexTuple& ab) {
        const Matrix lhs = rep.theta(gt.column(ab[0]), gt.column(ab[1])) * gv;
        const Matrix rhs = gv * rep.theta(ab[0], ab[1]);
        if (!(lhs == rhs)) out.add("rep.g-module", {g, ab[0], ab[1]}, lhs.entries(), rhs.entries());
      });
    }
  }
  return out;
}

/// theta(a, b) v = [v a b], A = alpha.
inline Representation adjoint_representation(const HomLts& t) {
  require(verify_hom_lts(t).passed(), "adjoint_representation: input is not a verified Hom-Lts");
  const std::size_t n = t.dim();
  Vector theta(n * n * n * n, Scalar(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) theta[((i * n + j) * n + p) * n + q] = t.coeff(q, i, j, p);
  return Representation(n, n, std::move(theta), t.twist());
}

/// T + V with [(a,u)(b,v)(c,w)] = ([abc], theta(b,c)u - theta(a,c)v + D(a,b)w)
/// and twist alpha + A.
inline HomLts semidirect_sum(const HomLts& t, const Representation& rep) {
  require(verify_representation(t, rep).passed(), "semidirect_sum: representation does not verify");
  const std::size_t n = t.dim();
  const std::size_t m = rep.target_dim();
  const std::size_t N = n + m;
  Matrix tw(N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) tw(i, j) = t.twist()(i, j);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q) tw(n + p, n + q) = rep.a_twist()(p, q);
  Vector c(ipow(N, 4), Scalar(0));
  auto at = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) -> Scalar& {
    return c[((i * N + j) * N + k) * N + l];
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) at(i, j, k, l) = t.coeff(i, j, k, l);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Matrix th = rep.theta(a, b);
      const Matrix dd = rep.d(a, b);
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) {
          at(n + p, a, b, n + q) = th(q, p);   // [u b c] = theta(b,c) u
          at(a, n + p, b, n + q) = -th(q, p);  // [a v c] = -theta(a,c) v
          at(a, b, n + p, n + q) = dd(q, p);   // [a b w] = D(a,b) w
        }
    }
  return HomLts(N, std::move(c), std::move(tw));
}

}  // namespace homlts
