#pragma once

// Command dispatch and deterministic report rendering.

#include "homlts/cli/instance.hpp"

#include "json.hpp"

namespace homlts::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { exit_ok = 0, exit_failed = 1, exit_usage = 2, exit_size_cap = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::size_t> degree;
  bool equivariant = false;
  std::optional<std::size_t> to;
  SizeLimits limits;
};

struct Report {
  Json body;
  int exit_code = exit_ok;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"verify",           "cohomology",  "central-extension", "extract-cocycle",
                                             "extend-deformation", "equivalence", "report-all"};
  return c;
}

namespace detail {

inline std::string vec_str(std::span<const Scalar> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].get_str();
  return s + ")";
}

class Sink {
 public:
  void fail() { failed_ = true; }
  bool failed() const { return failed_; }

  Json check(const std::string& name, const VerificationReport& r) {
    Json j;
    j["name"] = name;
    j["status"] = r.passed() ? "pass" : "fail";
    j["violations"] = r.violations.size();
    if (!r.passed()) {
      j["first_violation"] = r.summary();
      fail();
    }
    return j;
  }

  Json error(const std::string& name, const std::exception& e) {
    fail();
    Json j;
    j["name"] = name;
    j["status"] = "error";
    j["message"] = e.what();
    return j;
  }

 private:
  bool failed_ = false;
};

/// Runs fn, turning contract/hypothesis/consistency errors into an error
/// entry. Size-cap errors propagate.
template <class Fn>
Json guarded(Sink& sink, const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const SizeCapExceeded&) {
    throw;
  } catch (const ContractViolation& e) {
    return sink.error(name, e);
  } catch (const HypothesisError& e) {
    return sink.error(name, e);
  } catch (const ConsistencyError& e) {
    return sink.error(name, e);
  }
}

inline ComplexContext cochain_context(const InstanceDocument& doc, const std::string& coefficients) {
  const bool eq = doc.action.has_value();
  if (coefficients == "representation") return ComplexContext::create(doc.lts, *doc.rep, doc.action, doc.rep_action, eq);
  if (coefficients == "fiber") return extension_context(doc.lts, doc.action, *doc.fiber);
  return ComplexContext::adjoint(doc.lts, doc.action, eq);
}

inline const NamedDeformation* find_deformation(const InstanceDocument& doc, const std::string& name) {
  for (const auto& d : doc.deformations)
    if (d.name == name) return &d;
  return nullptr;
}

inline Json verify_section(const InstanceDocument& doc, Sink& sink) {
  Json checks = Json::array();
  const auto base = verify_hom_lts(doc.lts);
  checks.push_back(sink.check("hom-lts", base));
  if (doc.group) checks.push_back(sink.check("group", doc.group->check_axioms()));
  if (doc.action) checks.push_back(sink.check("action", verify_group_action(*doc.action, doc.lts)));
  if (doc.rep) checks.push_back(sink.check("representation", verify_representation(doc.lts, *doc.rep, doc.action, doc.rep_action)));
  if (doc.fiber && doc.fiber->action) {
    VerificationReport r = verify_linear_action(*doc.fiber->action);
    const Matrix& a = doc.fiber->twist;
    for (std::size_t g = 0; g < doc.fiber->action->group().order(); ++g) {
      const Matrix& m = doc.fiber->action->matrix(g);
      if (!(m * a == a * m)) r.add("fiber.g-twist", {g}, (m * a).entries(), (a * m).entries());
    }
    checks.push_back(sink.check("fiber", r));
  }
  for (const auto& e : doc.extensions) checks.push_back(sink.check("extension " + e.name, verify_central_extension(e.ext)));
  for (const auto& c : doc.cochains)
    checks.push_back(guarded(sink, "cochain " + c.name, [&] {
      return sink.check("cochain " + c.name, is_cochain(cochain_context(doc, c.coefficients), c.f));
    }));
  for (const auto& d : doc.deformations)
    checks.push_back(guarded(sink, "deformation " + d.name, [&] {
      return sink.check("deformation " + d.name, verify_deformation(d.d, d.d.order()));
    }));
  for (const auto& iso : doc.isomorphisms)
    checks.push_back(guarded(sink, "isomorphism " + iso.name, [&] {
      VerificationReport r = verify_isomorphism(iso.psi);
      if (r.passed() && !iso.source.empty() && !iso.target.empty()) {
        const Deformation& src = find_deformation(doc, iso.source)->d;
        const Deformation& tgt = find_deformation(doc, iso.target)->d;
        const std::size_t order = std::min({iso.psi.order(), src.order(), tgt.order()});
        const Deformation img = apply_isomorphism(iso.psi, src, order);
        for (std::size_t r2 = 1; r2 <= order; ++r2)
          if (img.mu(r2) != tgt.mu(r2)) r.add("transport", {r2}, img.mu(r2), tgt.mu(r2));
      }
      return sink.check("isomorphism " + iso.name, r);
    }));
  Json out;
  out["checks"] = std::move(checks);
  return out;
}

inline Json dims_json(const CohomologyDims& d, const std::string& fingerprint) {
  Json j;
  j["degree"] = d.degree;
  j["cochains"] = d.cochains;
  j["z"] = d.z;
  j["b"] = d.b;
  j["h"] = d.h;
  if (d.degree == 1) j["convention"] = "H^1 = ker delta^1";
  j["basis_fingerprint"] = fingerprint;
  return j;
}

inline Json cohomology_section(const InstanceDocument& doc, const std::vector<std::size_t>& degrees,
                               const std::vector<bool>& flags, const Options& opt, Sink& sink) {
  Json out = Json::array();
  for (const bool eq : flags) {
    Json block;
    block["complex"] = doc.rep ? "representation" : "adjoint";
    block["equivariant"] = eq;
    block["degrees"] = guarded(sink, "cohomology", [&]() -> Json {
      const ComplexContext ctx = doc.rep ? ComplexContext::create(doc.lts, *doc.rep, doc.action, doc.rep_action, eq)
                                         : ComplexContext::adjoint(doc.lts, doc.action, eq);
      Json ds = Json::array();
      for (auto d : degrees) ds.push_back(dims_json(cohomology_dims(ctx, d, opt.limits), cochain_basis(ctx, d, opt.limits).fingerprint()));
      return ds;
    });
    out.push_back(std::move(block));
  }
  return out;
}

inline Json central_extension_section(const InstanceDocument& doc, const Options& opt, Sink& sink) {
  if (!doc.fiber) throw UsageError("central-extension needs a [fiber] section");
  Json out;
  out["equivariant"] = doc.action.has_value();
  {
    const Matrix c = center(doc.lts);
    Json cols = Json::array();
    for (std::size_t j = 0; j < c.cols(); ++j) cols.push_back(vec_str(c.column(j)));
    out["center"] = std::move(cols);
  }
  std::optional<ComplexContext> ctx;
  out["cohomology"] = guarded(sink, "fiber complex", [&]() -> Json {
    ctx = extension_context(doc.lts, doc.action, *doc.fiber);
    Json ds = Json::array();
    for (std::size_t d : {1, 3}) ds.push_back(dims_json(cohomology_dims(*ctx, d, opt.limits), cochain_basis(*ctx, d, opt.limits).fingerprint()));
    return ds;
  });
  std::vector<std::pair<std::string, CentralExtension>> built;
  Json exts = Json::array();
  for (const auto& c : doc.cochains) {
    if (c.coefficients != "fiber" || c.f.degree != 3 || !ctx) continue;
    exts.push_back(guarded(sink, "cocycle " + c.name, [&]() -> Json {
      Json j;
      j["cocycle"] = c.name;
      const CentralExtension e = extension_from_cocycle(doc.lts, doc.action, *doc.fiber, c.f);
      const auto v = verify_central_extension(e);
      j["verification"] = sink.check("extension " + c.name, v);
      j["class"] = vec_str(cohomology_class(*ctx, c.f, opt.limits).coords);
      const bool round_trip = cocycle_from_extension(e) == c.f;
      j["round_trip"] = round_trip;
      if (!round_trip) sink.fail();
      j["extension_text"] = write_extension(c.name + "-ext", e);
      built.emplace_back(c.name, e);
      return j;
    }));
  }
  out["extensions"] = std::move(exts);
  Json pairs = Json::array();
  for (std::size_t a = 0; a < built.size(); ++a)
    for (std::size_t b = a + 1; b < built.size(); ++b) {
      const std::string name = built[a].first + " ~ " + built[b].first;
      pairs.push_back(guarded(sink, name, [&]() -> Json {
        Json j;
        j["pair"] = name;
        const auto phi = extensions_equivalent(built[a].second, built[b].second, opt.limits);
        j["equivalent"] = phi.has_value();
        if (phi) j["phi"] = format_matrix(*phi);
        return j;
      }));
    }
  out["equivalence"] = std::move(pairs);
  return out;
}

inline Json extract_cocycle_section(const InstanceDocument& doc, const Options& opt, Sink& sink) {
  if (doc.extensions.empty()) throw UsageError("extract-cocycle needs at least one [extension NAME] section");
  Json out = Json::array();
  for (const auto& e : doc.extensions) {
    Json j;
    j["extension"] = e.name;
    const auto v = verify_central_extension(e.ext);
    j["verification"] = sink.check("extension " + e.name, v);
    if (v.passed()) {
      Json body = guarded(sink, "cocycle " + e.name, [&]() -> Json {
        Json k;
        const Cochain h = cocycle_from_extension(e.ext);
        const ComplexContext ctx = extension_context(e.ext.base, e.ext.base_action, e.ext.fiber);
        k["is_cocycle"] = CoboundaryOperator(ctx, 3, opt.limits).apply(h).is_zero();
        k["class"] = vec_str(cohomology_class(ctx, h, opt.limits).coords);
        k["cochain_text"] = write_cochain(e.name + "-cocycle", "fiber", h);
        return k;
      });
      for (auto& [key, val] : body.items()) j[key] = val;
    }
    out.push_back(std::move(j));
  }
  return out;
}

inline Json extend_section(const InstanceDocument& doc, const Options& opt, Sink& sink) {
  if (doc.deformations.empty()) throw UsageError("extend-deformation needs at least one [deformation NAME] section");
  Json out = Json::array();
  for (const auto& nd : doc.deformations) {
    Json j;
    j["deformation"] = nd.name;
    const std::size_t target = opt.to.value_or(nd.d.order() + 2);
    j["target_order"] = target;
    const Json body = guarded(sink, "deformation " + nd.name, [&]() -> Json {
      Json k;
      const auto v = verify_deformation(nd.d, nd.d.order());
      k["verification"] = sink.check("deformation " + nd.name, v);
      if (!v.passed()) return k;
      if (std::any_of(nd.d.terms.begin(), nd.d.terms.end(), [](const Vector& t) { return !is_zero(t); })) {
        const auto inf = infinitesimal(nd.d, opt.limits);
        Json ij;
        ij["index"] = inf.index;
        ij["is_cocycle"] = inf.is_cocycle;
        k["infinitesimal"] = std::move(ij);
      } else {
        k["infinitesimal"] = "none (all terms zero)";
      }
      const ExtensionRun run = extend_to_order(nd.d, target, opt.limits);
      Json steps = Json::array();
      for (const auto& ob : run.obstructions) {
        Json s;
        s["order"] = ob.order;
        s["obstruction_zero"] = ob.cochain.is_zero();
        s["obstruction_is_cocycle"] = ob.is_cocycle;
        s["witness"] = ob.witness ? (ob.witness->is_zero() ? "zero" : "nonzero") : "none";
        steps.push_back(std::move(s));
      }
      k["steps"] = std::move(steps);
      k["reached_order"] = run.deformation.order();
      if (run.first_blocked) {
        sink.fail();
        k["first_blocked"] = *run.first_blocked;
        k["blocked_class"] = vec_str(run.blocked_class->coords);
        k["h5_dim"] = run.blocked_class->dim;
      }
      k["deformation_text"] = write_deformation(nd.name + "-ext", run.deformation);
      return k;
    });
    for (auto& [key, val] : body.items()) j[key] = val;
    out.push_back(std::move(j));
  }
  return out;
}

inline Json equivalence_section(const InstanceDocument& doc, const Options& opt, Sink& sink) {
  if (doc.deformations.empty()) throw UsageError("equivalence needs at least one [deformation NAME] section");
  Json out;
  Json triv = Json::array();
  std::vector<bool> valid;
  for (const auto& nd : doc.deformations) {
    const bool ok = verify_deformation(nd.d, nd.d.order()).passed();
    valid.push_back(ok);
    Json j;
    j["deformation"] = nd.name;
    if (!ok) {
      sink.fail();
      j["status"] = "deformation does not verify";
      triv.push_back(std::move(j));
      continue;
    }
    const std::size_t order = std::min(opt.to.value_or(nd.d.order()), nd.d.order());
    j["order"] = order;
    const Json body = guarded(sink, "trivial " + nd.name, [&]() -> Json {
      Json k;
      const auto psi = is_trivial(nd.d, order, opt.limits);
      k["trivial"] = psi.has_value();
      if (psi) k["isomorphism_text"] = write_isomorphism(nd.name + "-trivialization", *psi, nd.name, "");
      return k;
    });
    for (auto& [key, val] : body.items()) j[key] = val;
    triv.push_back(std::move(j));
  }
  out["triviality"] = std::move(triv);
  Json pairs = Json::array();
  for (std::size_t a = 0; a < doc.deformations.size(); ++a)
    for (std::size_t b = a + 1; b < doc.deformations.size(); ++b) {
      if (!valid[a] || !valid[b]) continue;
      const auto& da = doc.deformations[a];
      const auto& db = doc.deformations[b];
      const std::string name = da.name + " ~ " + db.name;
      const std::size_t order = std::min({opt.to.value_or(std::min(da.d.order(), db.d.order())), da.d.order(), db.d.order()});
      pairs.push_back(guarded(sink, name, [&]() -> Json {
        Json j;
        j["pair"] = name;
        j["order"] = order;
        const auto psi = deformations_equivalent(da.d, db.d, order, opt.limits);
        j["equivalent"] = psi.has_value();
        if (psi) j["isomorphism_text"] = write_isomorphism(da.name + "-to-" + db.name, *psi, da.name, db.name);
        else sink.fail();
        return j;
      }));
    }
  out["pairs"] = std::move(pairs);
  return out;
}

}  // namespace detail

/// Dispatches a command. Throws UsageError for unusable requests and
/// SizeCapExceeded when a tensor exceeds the configured cap.
inline Report execute(const InstanceDocument& doc, const std::string& command, const Options& opt) {
  if (std::find(commands().begin(), commands().end(), command) == commands().end())
    throw UsageError("unknown command '" + command + "'");
  if (opt.equivariant && !doc.action) throw UsageError("--equivariant needs a [group] and [action] section");
  if (opt.degree && *opt.degree % 2 == 0) throw UsageError("--degree must be odd");

  detail::Sink sink;
  Report rep;
  Json& b = rep.body;
  b["command"] = command;
  Json inst;
  inst["name"] = doc.name;
  inst["description"] = doc.description;
  inst["dim"] = doc.dim();
  inst["fingerprint"] = doc.fingerprint;
  b["instance"] = std::move(inst);
  Json o;
  if (opt.degree) o["degree"] = *opt.degree;
  o["equivariant"] = opt.equivariant;
  if (opt.to) o["to"] = *opt.to;
  o["max_tensor_entries"] = opt.limits.max_tensor_entries;
  b["options"] = std::move(o);

  if (command == "verify") {
    b["verify"] = detail::verify_section(doc, sink);
  } else if (command == "cohomology") {
    b["cohomology"] = detail::cohomology_section(doc, {opt.degree.value_or(3)}, {opt.equivariant}, opt, sink);
  } else if (command == "central-extension") {
    b["central_extension"] = detail::central_extension_section(doc, opt, sink);
  } else if (command == "extract-cocycle") {
    b["extract_cocycle"] = detail::extract_cocycle_section(doc, opt, sink);
  } else if (command == "extend-deformation") {
    b["extend_deformation"] = detail::extend_section(doc, opt, sink);
  } else if (command == "equivalence") {
    b["equivalence"] = detail::equivalence_section(doc, opt, sink);
  } else {
    b["verify"] = detail::verify_section(doc, sink);
    std::vector<std::size_t> degrees = opt.degree ? std::vector<std::size_t>{*opt.degree} : std::vector<std::size_t>{1, 3, 5};
    std::vector<bool> flags{false};
    if (doc.action) flags.push_back(true);
    b["cohomology"] = detail::cohomology_section(doc, degrees, flags, opt, sink);
    if (doc.fiber) b["central_extension"] = detail::central_extension_section(doc, opt, sink);
    if (!doc.extensions.empty()) b["extract_cocycle"] = detail::extract_cocycle_section(doc, opt, sink);
    if (!doc.deformations.empty()) {
      b["extend_deformation"] = detail::extend_section(doc, opt, sink);
      b["equivalence"] = detail::equivalence_section(doc, opt, sink);
    }
  }
  rep.exit_code = sink.failed() ? exit_failed : exit_ok;
  b["exit_code"] = rep.exit_code;
  return rep;
}

namespace detail {

inline std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "null";
  return v.dump();
}

inline void render(const Json& v, std::size_t indent, std::vector<std::string>& lines);

inline void render_entry(const std::string& key, const Json& v, std::size_t indent, std::vector<std::string>& lines) {
  const std::string pad(indent, ' ');
  if (v.is_object() || v.is_array()) {
    if (v.empty()) {
      lines.push_back(pad + key + ": " + (v.is_array() ? "[]" : "{}"));
      return;
    }
    lines.push_back(pad + key + ":");
    render(v, indent + 2, lines);
  } else if (v.is_string() && v.get<std::string>().find('\n') != std::string::npos) {
    lines.push_back(pad + key + ": |");
    std::istringstream in(v.get<std::string>());
    std::string l;
    while (std::getline(in, l)) lines.push_back(std::string(indent + 2, ' ') + l);
  } else {
    lines.push_back(pad + key + ": " + scalar_text(v));
  }
}

inline void render(const Json& v, std::size_t indent, std::vector<std::string>& lines) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) render_entry(k, x, indent, lines);
    return;
  }
  const std::string pad(indent, ' ');
  for (const auto& x : v) {
    if (x.is_object() && !x.empty()) {
      const std::size_t first = lines.size();
      render(x, indent + 2, lines);
      lines[first].replace(0, indent + 2, pad + "- ");
    } else if (x.is_array() && !x.empty()) {
      lines.push_back(pad + "-");
      render(x, indent + 2, lines);
    } else {
      lines.push_back(pad + "- " + scalar_text(x));
    }
  }
}

}  // namespace detail

inline std::string render_text(const Json& body) {
  std::vector<std::string> lines;
  detail::render(body, 0, lines);
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

inline std::string render_json(const Json& body) { return body.dump(2) + "\n"; }

}  // namespace homlts::cli
