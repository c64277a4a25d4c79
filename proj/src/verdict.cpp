#include "blowup/verdict.hpp"

#include "blowup/pool.hpp"

#include <filesystem>
#include <sstream>

namespace blowup {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsGeneral:
      return "holds-general";
    case Verdict::HoldsRadialOnly:
      return "holds-radial-only";
    case Verdict::Indecisive:
      return "indecisive";
    case Verdict::Incomplete:
      return "incomplete";
  }
  return "?";
}

namespace {

std::string fmt(const char* name, double v) {
  std::ostringstream os;
  os.precision(6);
  os << name << " = " << v;
  return os.str();
}

std::string channel(int k, OperatorKind op) { return to_string(op) + "^(" + std::to_string(k) + ")"; }

struct Check {
  bool ok = true;
  bool complete = true;
};

Check radial_l1(const SpectralEvidence& ev, PropertyVerdict& out) {
  Check c;
  const auto it = ev.index.find({0, OperatorKind::L1});
  if (it == ev.index.end()) {
    out.missing.push_back("index " + channel(0, OperatorKind::L1));
    c.complete = false;
    return c;
  }
  const int ind = it->second;
  out.chain.push_back("ind L1 = " + std::to_string(ind));
  if (ind == 0) return c;
  if (!ev.k11 || (ind >= 2 && (!ev.k22 || !ev.kk))) {
    out.missing.push_back("K forms");
    c.complete = false;
    return c;
  }
  out.chain.push_back(fmt("K11", *ev.k11));
  if (ind == 1) {
    c.ok = *ev.k11 < 0;
  } else if (ind == 2) {
    out.chain.push_back(fmt("K22", *ev.k22));
    out.chain.push_back(fmt("KK", *ev.kk));
    c.ok = *ev.k11 < 0 && *ev.k22 < 0 && *ev.kk > 0;
  } else {
    c.ok = false;
    out.chain.push_back("ind L1 > 2: only two directions available");
  }
  return c;
}

Check radial_l2(const SpectralEvidence& ev, PropertyVerdict& out, bool second) {
  Check c;
  const auto it = ev.index.find({0, OperatorKind::L2});
  if (it == ev.index.end()) {
    out.missing.push_back("index " + channel(0, OperatorKind::L2));
    c.complete = false;
    return c;
  }
  const int ind = it->second;
  out.chain.push_back("ind L2 = " + std::to_string(ind));
  if (ind == 0) return c;
  const auto& form = second ? ev.l2z : ev.jj;
  const char* name = second ? "<L2 Z, Z>" : "JJ";
  if (!form) {
    out.missing.push_back(name);
    c.complete = false;
    return c;
  }
  out.chain.push_back(fmt(name, *form));
  c.ok = ind == 1 && *form < 0;
  return c;
}

Check nonradial(const SpectralEvidence& ev, OperatorKind op, PropertyVerdict& out) {
  Check c;
  int previous = -1;
  for (int k = 1;; ++k) {
    const auto it = ev.index.find({k, op});
    if (it == ev.index.end()) {
      out.missing.push_back("index " + channel(k, op));
      c.complete = false;
      return c;
    }
    const int ind = it->second;
    out.chain.push_back("ind " + channel(k, op) + " = " + std::to_string(ind));
    if (previous >= 0 && ind > previous) out.chain.push_back("index not monotone in k");
    previous = ind;
    if (ind == 0) return c;
    if (k == 1 && ind == 1) {
      const auto& form = op == OperatorKind::L1 ? ev.k11_1 : ev.j11_1;
      const char* name = op == OperatorKind::L1 ? "K11^(1)" : "J11^(1)";
      if (!form) {
        out.missing.push_back(name);
        c.complete = false;
        return c;
      }
      out.chain.push_back(fmt(name, *form));
      if (!(*form < 0)) c.ok = false;
    } else {
      if (k == 2 && op == OperatorKind::L1 && ev.k11_2) out.chain.push_back(fmt("K11^(2)", *ev.k11_2));
      out.chain.push_back(channel(k, op) + " has a negative direction with no orthogonality condition");
      c.ok = false;
    }
    if (k > 16) {
      out.chain.push_back("no zero index up to k = 16");
      c.ok = false;
      return c;
    }
  }
}

PropertyVerdict decide(const SpectralEvidence& ev, bool second) {
  PropertyVerdict out;
  const Check a = radial_l1(ev, out);
  const Check b = radial_l2(ev, out, second);
  const Check c = nonradial(ev, OperatorKind::L1, out);
  const Check d = nonradial(ev, OperatorKind::L2, out);
  out.radial = a.complete && b.complete && a.ok && b.ok;
  out.general = c.complete && d.complete && c.ok && d.ok;
  if (!a.complete || !b.complete)
    out.verdict = Verdict::Incomplete;
  else if (!out.radial)
    out.verdict = Verdict::Indecisive;
  else if (!c.complete || !d.complete)
    out.verdict = Verdict::Incomplete;
  else
    out.verdict = out.general ? Verdict::HoldsGeneral : Verdict::HoldsRadialOnly;
  return out;
}

}  // namespace

SpectralVerdict assemble_verdict(const SpectralEvidence& ev) { return {decide(ev, false), decide(ev, true)}; }

SpectralReport analyze_dimension(const GroundStateProfile& prof, unsigned workers) {
  SpectralReport rep;
  rep.dim = prof.dim;
  const auto run = [&prof](int k, OperatorKind op) {
    ChannelReport c;
    c.ivp = count_index(prof, k, op);
    c.fd = fd_spectrum(RadialPotential(prof, op), prof.dim, k);
    return c;
  };
  // Channels k = 0..3 for both operators; extended while an index stays positive.
  for (int k0 = 0; k0 <= 12; k0 += 4) {
    std::vector<std::pair<int, OperatorKind>> todo;
    for (const auto op : {OperatorKind::L1, OperatorKind::L2}) {
      bool settled = false;
      for (const auto& c : rep.channels)
        if (c.ivp.op == op && c.ivp.harmonic > 0 && c.ivp.zero_count == 0) settled = true;
      if (!settled)
        for (int k = k0; k < k0 + 4; ++k) todo.emplace_back(k, op);
    }
    if (todo.empty()) break;
    std::vector<ChannelReport> batch(todo.size());
    parallel_for(todo.size(), workers, [&](std::size_t i) { batch[i] = run(todo[i].first, todo[i].second); });
    for (auto& c : batch) rep.channels.push_back(std::move(c));
  }

  bool second = false;
  for (const auto& c : rep.channels) {
    rep.evidence.index[{c.ivp.harmonic, c.ivp.op}] = c.ivp.zero_count;
    if (c.ivp.harmonic == 2 && c.ivp.op == OperatorKind::L1 && c.ivp.zero_count > 0) second = true;
  }
  parallel_for(3, workers, [&](std::size_t i) {
    if (i == 0) rep.forms = bilinear_matrix(prof);
    if (i == 1) rep.l2z = property2_form(prof);
    if (i == 2) rep.harmonic = harmonic_forms(prof, second);
  });

  IvpOptions longrun;
  longrun.use_positivity = false;
  const RadialPotential v1(prof, OperatorKind::L1);
  if (prof.dim >= 3) rep.table_positivity = positivity_criterion(count_index(v1, prof.dim, 0, OperatorKind::L1, longrun), v1, prof.dim, 6.0);

  auto& ev = rep.evidence;
  ev.dim = prof.dim;
  ev.k11 = rep.forms.k.m11;
  ev.k22 = rep.forms.k.m22;
  ev.kk = rep.forms.k.det();
  ev.jj = rep.forms.j.det();
  ev.l2z = rep.l2z;
  ev.k11_1 = rep.harmonic.k11_1;
  ev.j11_1 = rep.harmonic.j11_1;
  ev.k11_2 = rep.harmonic.k11_2;
  rep.verdict = assemble_verdict(ev);
  return rep;
}

void export_spectral(const SpectralReport& rep, const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string tag = "d" + std::to_string(rep.dim);
  Json j;
  j["dim"] = rep.dim;
  j["evidence"] = to_json(rep.evidence);
  j["forms"] = to_json(rep.forms);
  j["l2z"] = rep.l2z;
  j["harmonic"] = to_json(rep.harmonic);
  j["positivity_r0"] = {{"r0", rep.table_positivity.r0},
                        {"sign_product", rep.table_positivity.sign_product},
                        {"printed_column", rep.table_positivity.printed_column},
                        {"worst_margin", rep.table_positivity.worst_margin},
                        {"failing_radius", rep.table_positivity.failing_radius},
                        {"holds", rep.table_positivity.holds}};
  Table t;
  t.header = {"k", "operator", "zero_count", "fd_count", "fd_lowest", "termination_radius", "tail_c2", "tail_slope"};
  t.columns.resize(t.header.size());
  for (const auto& c : rep.channels) {
    j["channels"].push_back(to_json(c.ivp));
    j["channels"].back()["fd_count"] = c.fd.negative_count;
    j["channels"].back()["fd_lowest"] = c.fd.lowest;
    const double row[] = {double(c.ivp.harmonic), c.ivp.op == OperatorKind::L1 ? 1.0 : 2.0, double(c.ivp.zero_count),
                          double(c.fd.negative_count), c.fd.lowest, c.ivp.termination_radius, c.ivp.tail.c2,
                          c.ivp.tail.slope};
    for (std::size_t i = 0; i < t.columns.size(); ++i) t.columns[i].push_back(row[i]);
  }
  j["property1"] = to_json(rep.verdict.property1);
  j["property2"] = to_json(rep.verdict.property2);
  write_json(fs::path(dir) / ("spectral_" + tag + ".json"), j);
  write_csv(fs::path(dir) / ("channels_" + tag + ".csv"), t);
}

Json to_json(const SpectralEvidence& ev) {
  Json j;
  j["dim"] = ev.dim;
  for (const auto& [key, ind] : ev.index) j["index"][channel(key.first, key.second)] = ind;
  const auto put = [&](const char* name, const std::optional<double>& v) {
    if (v) j["forms"][name] = *v;
  };
  put("K11", ev.k11);
  put("K22", ev.k22);
  put("KK", ev.kk);
  put("JJ", ev.jj);
  put("l2z", ev.l2z);
  put("K11_1", ev.k11_1);
  put("J11_1", ev.j11_1);
  put("K11_2", ev.k11_2);
  return j;
}

Json to_json(const PropertyVerdict& v) {
  return Json{{"verdict", to_string(v.verdict)}, {"radial", v.radial}, {"general", v.general},
              {"chain", v.chain}, {"missing", v.missing}};
}

}  // namespace blowup
