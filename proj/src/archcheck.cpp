#include "dermaprep/archcheck.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace dermaprep::arch {

std::string TensorShape::str() const {
  return std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width);
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv: return "conv";
    case LayerKind::transconv: return "transconv";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::upconv: return "upconv";
    case LayerKind::upsample: return "upsample";
  }
  return "?";
}

namespace {

void check_hyper(int kernel, int stride, int padding, int dilation) {
  if (kernel < 1 || stride < 1 || padding < 0 || dilation < 1)
    throw InvalidArgument("invalid layer hyperparameters: need k>=1, s>=1, p>=0, d>=1");
}

}  // namespace

int infer_conv(int in, int kernel, int stride, int padding, int dilation) {
  check_hyper(kernel, stride, padding, dilation);
  const int span = in + 2 * padding - dilation * (kernel - 1) - 1;
  // floor division; a negative span means the window never fits.
  if (span < 0)
    throw ShapeError(-1, "layer collapses input: size " + std::to_string(in) + " with k" +
                             std::to_string(kernel) + " s" + std::to_string(stride) + " p" +
                             std::to_string(padding) + " d" + std::to_string(dilation));
  return span / stride + 1;
}

int infer_transconv(int in, int kernel, int stride, int padding, int dilation) {
  check_hyper(kernel, stride, padding, dilation);
  if (in < 1) throw ShapeError(-1, "layer collapses input: size " + std::to_string(in));
  const int out = (in - 1) * stride - 2 * padding + dilation * (kernel - 1) + 1;
  if (out < 1)
    throw ShapeError(-1, "layer collapses input: transposed output " + std::to_string(out));
  return out;
}

int infer_upconv(int in, int factor, int kernel, int stride, int padding, int dilation) {
  if (factor < 1) throw InvalidArgument("upsample factor must be >= 1");
  return infer_conv(in * factor, kernel, stride, padding, dilation);
}

std::int64_t param_count(const LayerSpec& layer, int in_channels, bool bias) {
  if (!layer.has_weights()) return 0;
  const std::int64_t k2 = static_cast<std::int64_t>(layer.kernel) * layer.kernel;
  const std::int64_t w = static_cast<std::int64_t>(in_channels) * layer.out_channels * k2;
  return w + (bias ? layer.out_channels : 0);
}

std::int64_t ShapeTrace::total_params() const {
  std::int64_t n = 0;
  for (const auto& r : rows) n += r.params;
  return n;
}

std::size_t ShapeTrace::mismatch_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const LayerTrace& r) { return !r.match; }));
}

namespace {

TensorShape infer_layer(const LayerSpec& l, const TensorShape& in) {
  auto both = [&](auto f) { return TensorShape{0, f(in.height), f(in.width)}; };
  TensorShape out;
  switch (l.kind) {
    case LayerKind::conv:
      out = both([&](int n) { return infer_conv(n, l.kernel, l.stride, l.padding, l.dilation); });
      out.channels = l.out_channels;
      break;
    case LayerKind::transconv:
      out = both([&](int n) { return infer_transconv(n, l.kernel, l.stride, l.padding, l.dilation); });
      out.channels = l.out_channels;
      break;
    case LayerKind::maxpool:
      out = both([&](int n) { return infer_conv(n, l.kernel, l.stride, l.padding, l.dilation); });
      out.channels = in.channels;
      break;
    case LayerKind::upconv:
      out = both([&](int n) {
        return infer_upconv(n, l.upsample_factor, l.kernel, l.stride, l.padding, l.dilation);
      });
      out.channels = l.out_channels;
      break;
    case LayerKind::upsample:
      if (l.upsample_factor < 1) throw InvalidArgument("upsample factor must be >= 1");
      out = {in.channels, in.height * l.upsample_factor, in.width * l.upsample_factor};
      break;
  }
  return out;
}

}  // namespace

ShapeTrace trace(const ArchSpec& spec, const TraceOptions& opts) {
  if (spec.layers.empty()) throw InvalidArgument("architecture '" + spec.name + "' has no layers");
  if (spec.input.channels < 1 || spec.input.height < 1 || spec.input.width < 1)
    throw InvalidArgument("architecture '" + spec.name + "' has a non-positive input shape");
  ShapeTrace t;
  t.network = spec.name;
  t.skip_connections = spec.skip_connections;
  TensorShape cur = spec.input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    LayerTrace row;
    row.index = static_cast<int>(i);
    row.layer = l;
    row.input = cur;
    try {
      row.inferred = infer_layer(l, cur);
    } catch (const ShapeError& e) {
      std::string where = spec.name + " layer " + std::to_string(i + 1);
      if (l.source_line > 0) where += " (line " + std::to_string(l.source_line) + ")";
      throw ShapeError(static_cast<int>(i), where + ": " + e.what() + ", input " + cur.str());
    }
    row.params = param_count(l, cur.channels, opts.bias);
    row.match = !l.declared || *l.declared == row.inferred;
    cur = l.declared ? *l.declared : row.inferred;
    t.rows.push_back(std::move(row));
  }
  return t;
}

CouplingReport verify_coupling(std::span<const ArchSpec> specs,
                               const std::vector<std::string>* declared_groups,
                               const TraceOptions& opts) {
  if (specs.size() < 2) throw InvalidArgument("verify_coupling needs at least two networks");
  using Signature = std::tuple<LayerKind, int, int, int, int, int, int>;
  struct Member {
    const ArchSpec* spec;
    const LayerTrace* row;
    Signature sig;
  };
  std::vector<ShapeTrace> traces;
  traces.reserve(specs.size());
  for (const auto& s : specs) traces.push_back(trace(s, opts));

  std::map<std::string, std::vector<Member>> groups;
  for (std::size_t si = 0; si < specs.size(); ++si) {
    for (const auto& row : traces[si].rows) {
      if (!row.layer.sharing_group) continue;
      const std::string& tag = *row.layer.sharing_group;
      if (declared_groups &&
          std::find(declared_groups->begin(), declared_groups->end(), tag) == declared_groups->end())
        throw ConfigError("unknown sharing group '" + tag + "' in " + specs[si].name);
      const auto& l = row.layer;
      groups[tag].push_back({&specs[si], &row,
                             Signature{l.kind, row.input.channels, l.out_channels, l.kernel,
                                       l.stride, l.padding, l.dilation}});
    }
  }

  auto describe = [](const Signature& s) {
    std::ostringstream os;
    os << to_string(std::get<0>(s)) << " in=" << std::get<1>(s) << " out=" << std::get<2>(s)
       << " k" << std::get<3>(s) << " s" << std::get<4>(s) << " p" << std::get<5>(s) << " d"
       << std::get<6>(s);
    return os.str();
  };

  CouplingReport report;
  for (const auto& [tag, members] : groups) {
    report.groups.push_back(tag);
    std::map<Signature, std::size_t> freq;
    for (const auto& m : members) ++freq[m.sig];
    // Most frequent signature wins; ties go to the first one encountered.
    const Signature* ref = &members.front().sig;
    std::size_t best = freq[*ref];
    for (const auto& m : members) {
      if (freq[m.sig] > best) {
        best = freq[m.sig];
        ref = &m.sig;
      }
    }
    for (const auto& m : members) {
      if (m.sig == *ref) continue;
      report.violations.push_back({tag, m.spec->name, m.row->index, m.row->layer.source_line,
                                   describe(m.sig) + " differs from shared " + describe(*ref)});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// DSL

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

class LineParser {
 public:
  LineParser(const std::string& source, int line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

  int integer(std::string_view tok, std::string_view what, int min_value) const {
    int v = 0;
    const auto* end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || p != end) fail("expected integer " + std::string(what) + ", got '" + std::string(tok) + "'");
    if (v < min_value) fail(std::string(what) + " must be >= " + std::to_string(min_value));
    return v;
  }

  // Prefixed token such as s2 / p1 / d4.
  std::optional<int> prefixed(const std::string& tok, char prefix, int min_value) const {
    if (tok.size() < 2 || tok[0] != prefix) return std::nullopt;
    if (!std::isdigit(static_cast<unsigned char>(tok[1]))) return std::nullopt;
    return integer(std::string_view(tok).substr(1), std::string(1, prefix), min_value);
  }

  // kKxK or kK.
  std::optional<int> kernel(const std::string& tok) const {
    if (tok.size() < 2 || tok[0] != 'k' || !std::isdigit(static_cast<unsigned char>(tok[1])))
      return std::nullopt;
    const auto body = std::string_view(tok).substr(1);
    const auto x = body.find('x');
    if (x == std::string_view::npos) return integer(body, "kernel", 1);
    const int a = integer(body.substr(0, x), "kernel", 1);
    const int b = integer(body.substr(x + 1), "kernel", 1);
    if (a != b) fail("only square kernels are supported, got " + tok);
    return a;
  }

 private:
  const std::string& source_;
  int line_;
};

LayerSpec parse_layer(const std::vector<std::string>& toks, const LineParser& lp, int line) {
  LayerSpec l;
  l.source_line = line;
  const std::string& kw = toks[0];
  std::size_t pos = 1;
  auto positional = [&](const char* what, int min_value) {
    if (pos >= toks.size()) lp.fail(kw + ": missing " + what);
    return lp.integer(toks[pos++], what, min_value);
  };

  bool need_kernel = true, need_stride_pad = true;
  if (kw == "conv") {
    l.kind = LayerKind::conv;
    l.out_channels = positional("output channels", 1);
  } else if (kw == "transconv") {
    l.kind = LayerKind::transconv;
    l.out_channels = positional("output channels", 1);
  } else if (kw == "upconv") {
    l.kind = LayerKind::upconv;
    l.upsample_factor = positional("upsample factor", 1);
    l.out_channels = positional("output channels", 1);
  } else if (kw == "maxpool") {
    l.kind = LayerKind::maxpool;
    need_stride_pad = false;
  } else if (kw == "upsample") {
    l.kind = LayerKind::upsample;
    l.upsample_factor = positional("upsample factor", 1);
    need_kernel = false;
    need_stride_pad = false;
  } else {
    lp.fail("unknown directive '" + kw + "'");
  }

  bool have_k = false, have_s = false, have_p = false;
  while (pos < toks.size()) {
    const std::string& t = toks[pos];
    if (t == "expect") {
      if (pos + 3 >= toks.size()) lp.fail("expect needs C H W");
      l.declared = TensorShape{lp.integer(toks[pos + 1], "expected channels", 1),
                               lp.integer(toks[pos + 2], "expected height", 1),
                               lp.integer(toks[pos + 3], "expected width", 1)};
      pos += 4;
      continue;
    }
    if (t == "share") {
      if (pos + 1 >= toks.size()) lp.fail("share needs a group tag");
      if (l.kind == LayerKind::maxpool || l.kind == LayerKind::upsample)
        lp.fail("only weighted layers can share parameters");
      l.sharing_group = toks[pos + 1];
      pos += 2;
      continue;
    }
    if (need_kernel) {
      if (auto k = lp.kernel(t)) {
        l.kernel = *k;
        have_k = true;
        ++pos;
        continue;
      }
      if (auto s = lp.prefixed(t, 's', 1)) {
        l.stride = *s;
        have_s = true;
        ++pos;
        continue;
      }
      if (auto p = lp.prefixed(t, 'p', 0)) {
        l.padding = *p;
        have_p = true;
        ++pos;
        continue;
      }
      if (auto d = lp.prefixed(t, 'd', 1)) {
        l.dilation = *d;
        ++pos;
        continue;
      }
    }
    lp.fail("unexpected token '" + t + "' in " + kw + " line");
  }
  if (need_kernel && !have_k) lp.fail(kw + ": missing kernel (kKxK)");
  if (need_kernel && !have_s) lp.fail(kw + ": missing stride (sS)");
  if (need_stride_pad && !have_p) lp.fail(kw + ": missing padding (pP)");
  return l;
}

}  // namespace

ArchFile parse_arch(std::string_view text, const std::string& source,
                    const std::string& default_name) {
  ArchFile file;
  struct Pending {
    ArchSpec spec;
    int copies = 1;
    bool has_input = false;
    int line = 0;
  };
  std::set<std::string> names;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  std::vector<Pending> all;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const auto toks = tokenize(hash == std::string::npos ? std::string_view(raw)
                                                         : std::string_view(raw).substr(0, hash));
    if (toks.empty()) continue;
    const LineParser lp(source, lineno);
    const std::string& kw = toks[0];

    if (kw == "network") {
      if (toks.size() < 2 || toks.size() > 3) lp.fail("usage: network NAME [xN]");
      Pending p;
      p.spec.name = toks[1];
      p.line = lineno;
      if (toks.size() == 3) {
        if (toks[2].size() < 2 || toks[2][0] != 'x') lp.fail("replication must look like x7");
        p.copies = lp.integer(std::string_view(toks[2]).substr(1), "replication count", 1);
      }
      if (!names.insert(p.spec.name).second) lp.fail("duplicate network name '" + p.spec.name + "'");
      all.push_back(std::move(p));
      continue;
    }
    if (kw == "group") {
      if (toks.size() < 2) lp.fail("usage: group TAG [TAG...]");
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (std::find(file.groups.begin(), file.groups.end(), toks[i]) != file.groups.end())
          lp.fail("group '" + toks[i] + "' declared twice");
        file.groups.push_back(toks[i]);
      }
      continue;
    }
    if (all.empty()) {
      Pending p;
      p.spec.name = default_name;
      p.line = lineno;
      names.insert(default_name);
      all.push_back(std::move(p));
    }
    Pending& cur = all.back();
    if (kw == "input") {
      if (cur.has_input) lp.fail("input declared twice for network '" + cur.spec.name + "'");
      if (!cur.spec.layers.empty()) lp.fail("input must precede the layers");
      if (toks.size() != 4) lp.fail("usage: input C H W");
      cur.spec.input = {lp.integer(toks[1], "input channels", 1), lp.integer(toks[2], "input height", 1),
                        lp.integer(toks[3], "input width", 1)};
      cur.has_input = true;
      continue;
    }
    if (kw == "skips") {
      if (toks.size() != 1) lp.fail("skips takes no arguments");
      cur.spec.skip_connections = true;
      continue;
    }
    if (!cur.has_input) lp.fail("layer before input line");
    LayerSpec layer = parse_layer(toks, lp, lineno);
    if (layer.sharing_group &&
        std::find(file.groups.begin(), file.groups.end(), *layer.sharing_group) == file.groups.end())
      lp.fail("unknown sharing group '" + *layer.sharing_group + "' (declare it with 'group')");
    cur.spec.layers.push_back(std::move(layer));
  }
  if (all.empty()) throw ParseError(source, lineno, "no layers");
  for (auto& p : all) {
    if (!p.has_input)
      throw ParseError(source, p.line, "network '" + p.spec.name + "' has no input line");
    if (p.spec.layers.empty())
      throw ParseError(source, p.line, "network '" + p.spec.name + "' has no layers");
    if (p.copies == 1) {
      file.networks.push_back(std::move(p.spec));
      continue;
    }
    for (int c = 1; c <= p.copies; ++c) {
      ArchSpec copy = p.spec;
      copy.name = p.spec.name + "_" + std::to_string(c);
      file.networks.push_back(std::move(copy));
    }
  }
  return file;
}

ArchFile load_arch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_arch(ss.str(), path, stem);
}

VerifyResult verify(const ArchFile& file, const TraceOptions& opts) {
  VerifyResult r;
  std::set<std::string> bad_rows;
  for (const auto& net : file.networks) {
    r.traces.push_back(trace(net, opts));
    for (const auto& row : r.traces.back().rows) {
      if (row.match) continue;
      bad_rows.insert(row.layer.source_line > 0
                          ? "line:" + std::to_string(row.layer.source_line)
                          : net.name + "#" + std::to_string(row.index));
    }
  }
  r.mismatched_rows = bad_rows.size();
  const bool any_shared = std::any_of(file.networks.begin(), file.networks.end(), [](const ArchSpec& s) {
    return std::any_of(s.layers.begin(), s.layers.end(),
                       [](const LayerSpec& l) { return l.sharing_group.has_value(); });
  });
  if (any_shared || !file.groups.empty()) {
    if (file.networks.size() < 2)
      throw ConfigError("sharing groups need at least two networks");
    r.coupling = verify_coupling(file.networks, &file.groups, opts);
  }
  return r;
}

void print_report(std::ostream& out, const VerifyResult& result) {
  struct Finding {
    const LayerTrace* row;
    std::vector<std::string> networks;
  };
  std::map<std::string, Finding> findings;
  std::vector<std::string> order;

  for (const auto& t : result.traces) {
    out << "network " << t.network << "  input "
        << (t.rows.empty() ? std::string("-") : t.rows.front().input.str()) << "\n";
    out << std::left << std::setw(4) << "#" << std::setw(6) << "line" << std::setw(11) << "layer"
        << std::setw(4) << "k" << std::setw(4) << "s" << std::setw(4) << "p" << std::setw(4) << "d"
        << std::setw(14) << "input" << std::setw(14) << "inferred" << std::setw(14) << "declared"
        << std::setw(12) << "params" << "status\n";
    for (const auto& row : t.rows) {
      const auto& l = row.layer;
      out << std::left << std::setw(4) << row.index + 1 << std::setw(6)
          << (l.source_line ? std::to_string(l.source_line) : "-") << std::setw(11)
          << to_string(l.kind) << std::setw(4) << l.kernel << std::setw(4) << l.stride << std::setw(4)
          << l.padding << std::setw(4) << l.dilation << std::setw(14) << row.input.str()
          << std::setw(14) << row.inferred.str() << std::setw(14)
          << (l.declared ? l.declared->str() : "-") << std::setw(12) << row.params
          << (row.match ? (l.declared ? "ok" : "-") : "MISMATCH") << "\n";
      if (!row.match) {
        const std::string key = l.source_line ? "line " + std::to_string(l.source_line)
                                              : t.network + " layer " + std::to_string(row.index + 1);
        auto [it, fresh] = findings.try_emplace(key, Finding{&row, {}});
        if (fresh) order.push_back(key);
        it->second.networks.push_back(t.network);
      }
    }
    out << "total params " << t.total_params() << "\n";
    if (t.skip_connections)
      out << "note: skip-connection concatenations are not declared; channel counts across them are "
             "unchecked\n";
    out << "\n";
  }

  if (result.coupling) {
    out << "coupling: " << result.coupling->groups.size() << " sharing groups, "
        << result.coupling->violations.size() << " violations\n";
    for (const auto& v : result.coupling->violations)
      out << "  VIOLATION group " << v.group << ": " << v.network << " layer " << v.layer_index + 1
          << (v.source_line ? " (line " + std::to_string(v.source_line) + ")" : std::string())
          << ": " << v.detail << "\n";
  }

  std::size_t matched = 0, total = 0;
  for (const auto& t : result.traces)
    for (const auto& row : t.rows)
      if (row.layer.declared) {
        ++total;
        matched += row.match ? 1 : 0;
      }
  out << "summary: " << matched << "/" << total << " declared shapes match, "
      << result.mismatched_rows << " mismatched row(s)\n";
  for (const auto& key : order) {
    const auto& f = findings.at(key);
    const auto& l = f.row->layer;
    out << "  MISMATCH " << key << ": " << to_string(l.kind) << " k" << l.kernel << " s" << l.stride
        << " p" << l.padding << " d" << l.dilation << " on " << f.row->input.str() << " declares "
        << l.declared->str() << ", infers " << f.row->inferred.str();
    if (f.networks.size() > 1)
      out << " (in " << f.networks.size() << " networks: " << f.networks.front() << " .. "
          << f.networks.back() << ")";
    else
      out << " (" << f.networks.front() << ")";
    out << "\n";
  }
}

}  // namespace dermaprep::arch
