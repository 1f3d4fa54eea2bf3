#include "csys/instances.hpp"

#include <algorithm>
#include <set>

namespace csys {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string table_json(const std::vector<std::uint32_t>& t) {
  return nlohmann::json(t).dump();
}

}  // namespace

// ---------------------------------------------------------------------------
// UnitCS

nlohmann::json UnitCS::config_json() const { return {{"kind", "unit"}}; }

ObHandle UnitCS::ft(ObHandle x) const { return ob(x.length == 0 ? 0 : x.length - 1); }

MorHandle UnitCS::mor(ObHandle src, ObHandle tgt) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(src.id, tgt.id);
  auto it = mor_index_.find(key);
  std::uint32_t id;
  if (it != mor_index_.end()) {
    id = it->second;
  } else {
    id = static_cast<std::uint32_t>(mors_.size());
    mors_.push_back(key);
    mor_index_.emplace(key, id);
  }
  return MorHandle{id, src, tgt};
}

std::vector<ObHandle> UnitCS::enum_objects(std::uint32_t max_len, const Budget&,
                                           bool* truncated) const {
  if (truncated) *truncated = false;
  std::vector<ObHandle> out;
  for (std::uint32_t n = 0; n <= max_len; ++n) out.push_back(ob(n));
  return out;
}

std::string UnitCS::ob_encoding(ObHandle x) const { return std::to_string(x.length); }

std::string UnitCS::mor_encoding(MorHandle m) const {
  nlohmann::json j{{"src", ob_encoding(m.src)}, {"tgt", ob_encoding(m.tgt)}};
  return j.dump();
}

std::optional<ObHandle> UnitCS::ob_from_encoding(const std::string& enc) const {
  auto j = nlohmann::json::parse(enc, nullptr, false);
  std::uint32_t n = 0;
  if (j.is_number_unsigned()) {
    n = j.get<std::uint32_t>();
  } else if (j.is_string()) {
    auto inner = nlohmann::json::parse(j.get<std::string>(), nullptr, false);
    if (!inner.is_number_unsigned()) return std::nullopt;
    n = inner.get<std::uint32_t>();
  } else {
    return std::nullopt;
  }
  return ob(n);
}

std::optional<MorHandle> UnitCS::mor_from_encoding(const std::string& enc) const {
  auto j = nlohmann::json::parse(enc, nullptr, false);
  if (!j.is_object() || !j.contains("src") || !j.contains("tgt")) return std::nullopt;
  auto src = ob_from_encoding(j["src"].is_string() ? j["src"].get<std::string>() : j["src"].dump());
  auto tgt = ob_from_encoding(j["tgt"].is_string() ? j["tgt"].get<std::string>() : j["tgt"].dump());
  if (!src || !tgt) return std::nullopt;
  return mor(*src, *tgt);
}

MorHandle UnitCS::do_proj(ObHandle x) const { return mor(x, ft(x)); }
ObHandle UnitCS::do_star(MorHandle f, ObHandle) const { return ob(f.src.length + 1); }
MorHandle UnitCS::do_q(MorHandle f, ObHandle x) const { return mor(do_star(f, x), x); }
MorHandle UnitCS::do_comp(MorHandle f, MorHandle g) const { return mor(f.src, g.tgt); }
MorHandle UnitCS::do_identity(ObHandle x) const { return mor(x, x); }
MorHandle UnitCS::do_sf(MorHandle f) const { return mor(f.src, ob(f.src.length + 1)); }

HomSet UnitCS::do_enum_hom(ObHandle y, ObHandle x, const Budget&) const {
  return HomSet{{mor(y, x)}, false};
}

std::vector<MorHandle> UnitCS::do_enum_sections(ObHandle x, const Budget&,
                                                bool* truncated) const {
  if (truncated) *truncated = false;
  return {mor(ft(x), x)};
}

// ---------------------------------------------------------------------------
// SemanticCS

ObHandle SemanticCS::ft(ObHandle x) const {
  std::lock_guard<std::mutex> lock(mu_);
  const ObRec& r = obs_[x.id];
  return ObHandle{r.ft_id, obs_[r.ft_id].len};
}

std::uint32_t SemanticCS::intern_ob(ObRec rec) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = ob_index_.find(rec.enc);
  if (it != ob_index_.end()) return it->second;
  std::uint32_t id = static_cast<std::uint32_t>(obs_.size());
  ob_index_.emplace(rec.enc, id);
  obs_.push_back(std::move(rec));
  return id;
}

std::optional<std::uint32_t> SemanticCS::find_ob(const std::string& enc) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = ob_index_.find(enc);
  if (it == ob_index_.end()) return std::nullopt;
  return it->second;
}

MorHandle SemanticCS::intern_mor(ObHandle src, ObHandle tgt,
                                 std::vector<std::uint32_t> table) const {
  std::string key;
  key.reserve(8 + table.size() * 4);
  auto put32 = [&key](std::uint32_t v) {
    key.push_back(static_cast<char>(v & 0xff));
    key.push_back(static_cast<char>((v >> 8) & 0xff));
    key.push_back(static_cast<char>((v >> 16) & 0xff));
    key.push_back(static_cast<char>((v >> 24) & 0xff));
  };
  put32(src.id);
  put32(tgt.id);
  for (std::uint32_t v : table) put32(v);

  std::lock_guard<std::mutex> lock(mu_);
  auto it = mor_index_.find(key);
  if (it != mor_index_.end()) return MorHandle{it->second, src, tgt};
  std::uint32_t id = static_cast<std::uint32_t>(mors_.size());
  mor_index_.emplace(std::move(key), id);
  mors_.push_back(MorRec{src.id, tgt.id, std::move(table)});
  return MorHandle{id, src, tgt};
}

const std::vector<std::uint32_t>& SemanticCS::mor_table(MorHandle m) const {
  std::lock_guard<std::mutex> lock(mu_);
  return mors_[m.id].table;
}

std::string SemanticCS::ob_encoding(ObHandle x) const {
  std::lock_guard<std::mutex> lock(mu_);
  return obs_[x.id].enc;
}

std::string SemanticCS::mor_encoding(MorHandle m) const {
  std::vector<std::uint32_t> table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    table = mors_[m.id].table;
  }
  nlohmann::json j{{"src", ob_encoding(m.src)}, {"tgt", ob_encoding(m.tgt)}, {"table", table}};
  return j.dump();
}

std::optional<MorHandle> SemanticCS::mor_from_encoding(const std::string& enc) const {
  auto j = nlohmann::json::parse(enc, nullptr, false);
  if (!j.is_object() || !j.contains("src") || !j.contains("tgt") || !j.contains("table"))
    return std::nullopt;
  auto get_enc = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  auto src = ob_from_encoding(get_enc(j["src"]));
  auto tgt = ob_from_encoding(get_enc(j["tgt"]));
  if (!src || !tgt || !j["table"].is_array()) return std::nullopt;
  std::vector<std::uint32_t> table;
  for (const auto& v : j["table"]) {
    if (!v.is_number_unsigned()) return std::nullopt;
    table.push_back(v.get<std::uint32_t>());
  }
  std::uint64_t ns, nt;
  {
    std::lock_guard<std::mutex> lock(mu_);
    ns = obs_[src->id].npts;
    nt = obs_[tgt->id].npts;
  }
  if (table.size() != ns) return std::nullopt;
  for (std::uint32_t v : table)
    if (v >= nt) return std::nullopt;
  return intern_mor(*src, *tgt, std::move(table));
}

std::uint64_t SemanticCS::point_count(ObHandle x) const {
  std::lock_guard<std::mutex> lock(mu_);
  return obs_[x.id].npts;
}

std::vector<std::string> SemanticCS::point_encodings(ObHandle x) const {
  if (x.length == 0) return {"*"};
  std::vector<std::string> parent_encs = point_encodings(ft(x));
  std::lock_guard<std::mutex> lock(mu_);
  const ObRec& r = obs_[x.id];
  std::vector<std::string> out;
  out.reserve(r.npts);
  for (std::uint64_t i = 0; i < r.npts; ++i)
    out.push_back("(" + parent_encs[r.parent[i]] + "," + std::to_string(r.elt[i]) + ")");
  return out;
}

MorHandle SemanticCS::do_proj(ObHandle x) const {
  std::vector<std::uint32_t> table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const ObRec& r = obs_[x.id];
    if (r.len == 0) {
      table = {0};
    } else {
      table = r.parent;
    }
  }
  if (x.length == 0) return intern_mor(x, x, {0});
  return intern_mor(x, ft(x), std::move(table));
}

MorHandle SemanticCS::do_q(MorHandle f, ObHandle x) const {
  ObHandle s = do_star(f, x);
  std::vector<std::uint32_t> table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const ObRec& sr = obs_[s.id];
    const ObRec& xr = obs_[x.id];
    const MorRec& fr = mors_[f.id];
    table.resize(sr.npts);
    for (std::uint64_t i = 0; i < sr.npts; ++i)
      table[i] =
          static_cast<std::uint32_t>(xr.offset[fr.table[sr.parent[i]]] + sr.elt[i]);
  }
  return intern_mor(s, x, std::move(table));
}

MorHandle SemanticCS::do_comp(MorHandle f, MorHandle g) const {
  std::vector<std::uint32_t> table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const MorRec& fr = mors_[f.id];
    const MorRec& gr = mors_[g.id];
    table.resize(fr.table.size());
    for (std::size_t i = 0; i < fr.table.size(); ++i) table[i] = gr.table[fr.table[i]];
  }
  return intern_mor(f.src, g.tgt, std::move(table));
}

MorHandle SemanticCS::do_identity(ObHandle x) const {
  std::vector<std::uint32_t> table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    table.resize(obs_[x.id].npts);
  }
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = static_cast<std::uint32_t>(i);
  return intern_mor(x, x, std::move(table));
}

MorHandle SemanticCS::do_sf(MorHandle f) const {
  ObHandle x = f.tgt;
  MorHandle ftm = do_comp(f, do_proj(x));
  ObHandle s = do_star(ftm, x);
  std::vector<std::uint32_t> table;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const ObRec& sr = obs_[s.id];
    const ObRec& xr = obs_[x.id];
    const MorRec& fr = mors_[f.id];
    table.resize(fr.table.size());
    for (std::size_t y = 0; y < fr.table.size(); ++y)
      table[y] = static_cast<std::uint32_t>(sr.offset[y] + xr.elt[fr.table[y]]);
  }
  return intern_mor(f.src, s, std::move(table));
}

HomSet SemanticCS::do_enum_hom(ObHandle y, ObHandle x, const Budget& b) const {
  // Enumeration is deterministic in (Y, X, caps, seed) and the checkers ask
  // for the same hom sets many times over, so memoise the result.
  std::array<std::uint64_t, 4> memo_key{y.id, x.id, b.hom_cap, b.rng_seed};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = hom_memo_.find(memo_key);
    if (it != hom_memo_.end()) return it->second;
  }
  HomSet fresh = enum_hom_uncached(y, x, b);
  std::lock_guard<std::mutex> lock(mu_);
  return hom_memo_.emplace(std::move(memo_key), std::move(fresh)).first->second;
}

HomSet SemanticCS::enum_hom_uncached(ObHandle y, ObHandle x, const Budget& b) const {
  std::uint64_t ny, nx;
  {
    std::lock_guard<std::mutex> lock(mu_);
    ny = obs_[y.id].npts;
    nx = obs_[x.id].npts;
  }
  HomSet out;
  if (ny == 0) {
    out.mors.push_back(intern_mor(y, x, {}));
    return out;
  }
  if (nx == 0) return out;  // no functions into the empty set

  std::uint64_t count = 1;
  bool exhaustive = true;
  for (std::uint64_t i = 0; i < ny; ++i) {
    count *= nx;
    if (count > b.hom_cap) {
      exhaustive = false;
      break;
    }
  }
  if (exhaustive) {
    std::vector<std::uint32_t> table(ny, 0);
    for (std::uint64_t n = 0; n < count; ++n) {
      out.mors.push_back(intern_mor(y, x, table));
      for (std::size_t i = table.size(); i-- > 0;) {
        if (++table[i] < nx) break;
        table[i] = 0;
      }
    }
    return out;
  }

  out.truncated = true;
  std::set<std::vector<std::uint32_t>> tables;
  if (y == x) {
    std::vector<std::uint32_t> idt(ny);
    for (std::uint64_t i = 0; i < ny; ++i) idt[i] = static_cast<std::uint32_t>(i);
    tables.insert(std::move(idt));
  }
  std::uint64_t state = fnv1a(ob_encoding(x), fnv1a(ob_encoding(y), b.rng_seed ^ 0x5c5c5c5cull));
  std::uint64_t guard = b.hom_cap * 64 + 64;
  while (tables.size() < b.hom_cap && guard-- > 0) {
    std::vector<std::uint32_t> t(ny);
    for (std::uint64_t i = 0; i < ny; ++i)
      t[i] = static_cast<std::uint32_t>(splitmix64(state) % nx);
    tables.insert(std::move(t));
  }
  for (const auto& t : tables) out.mors.push_back(intern_mor(y, x, t));
  return out;
}

std::vector<MorHandle> SemanticCS::do_enum_sections(ObHandle x, const Budget& b,
                                                    bool* truncated) const {
  if (truncated) *truncated = false;
  std::uint64_t nbase;
  std::vector<std::uint64_t> fibers;
  std::vector<std::uint64_t> offsets;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const ObRec& r = obs_[x.id];
    nbase = obs_[r.ft_id].npts;
    offsets = r.offset;
    for (std::uint64_t p = 0; p < nbase; ++p) fibers.push_back(fiber_size(r, static_cast<std::uint32_t>(p)));
  }
  ObHandle base = ft(x);
  std::vector<MorHandle> out;
  std::uint64_t count = 1;
  bool exhaustive = true;
  for (std::uint64_t p = 0; p < nbase; ++p) {
    if (fibers[p] == 0) return out;  // empty fiber: no sections
    count *= fibers[p];
    if (count > b.hom_cap) {
      exhaustive = false;
      break;
    }
  }
  if (exhaustive) {
    std::vector<std::uint32_t> choice(nbase, 0);
    for (std::uint64_t n = 0; n < count; ++n) {
      std::vector<std::uint32_t> table(nbase);
      for (std::uint64_t p = 0; p < nbase; ++p)
        table[p] = static_cast<std::uint32_t>(offsets[p] + choice[p]);
      out.push_back(intern_mor(base, x, std::move(table)));
      for (std::size_t i = choice.size(); i-- > 0;) {
        if (++choice[i] < fibers[i]) break;
        choice[i] = 0;
      }
    }
    return out;
  }

  if (truncated) *truncated = true;
  std::uint64_t state = fnv1a(ob_encoding(x), b.rng_seed ^ 0x7e7e7e7eull);
  std::set<std::vector<std::uint32_t>> tables;
  std::uint64_t guard = b.hom_cap * 64 + 64;
  while (tables.size() < b.hom_cap && guard-- > 0) {
    std::vector<std::uint32_t> t(nbase);
    for (std::uint64_t p = 0; p < nbase; ++p)
      t[p] = static_cast<std::uint32_t>(offsets[p] + splitmix64(state) % fibers[p]);
    tables.insert(std::move(t));
  }
  for (const auto& t : tables) out.push_back(intern_mor(base, x, t));
  return out;
}

// ---------------------------------------------------------------------------
// ContextCS

ContextCS::ContextCS(std::vector<std::uint32_t> base_sizes) : base_sizes_(std::move(base_sizes)) {
  if (base_sizes_.empty()) throw domain_error("context: base_sizes must be nonempty");
  for (std::uint32_t s : base_sizes_)
    if (s == 0) throw domain_error("context: base sizes must be positive");
  ObRec pt_rec;
  pt_rec.enc = "[]";
  pt_rec.len = 0;
  pt_rec.ft_id = 0;
  pt_rec.npts = 1;
  intern_ob(std::move(pt_rec));
}

nlohmann::json ContextCS::config_json() const {
  return {{"kind", "context"}, {"base_sizes", base_sizes_}};
}

ObHandle ContextCS::do_pt() const { return handle_of(0); }

std::vector<std::uint32_t> ContextCS::tuple_of(ObHandle x) const {
  if (x.length == 0) return {};
  std::lock_guard<std::mutex> lock(tuples_mu_);
  return tuples_[x.id];
}

ObHandle ContextCS::extend(ObHandle parent, std::uint32_t base) const {
  const std::uint64_t fs = base_sizes_[base];
  std::vector<std::uint32_t> tuple = tuple_of(parent);
  tuple.push_back(base);

  ObRec rec;
  std::string penc = ob_encoding(parent);
  if (penc == "[]") {
    rec.enc = "[" + std::to_string(base) + "]";
  } else {
    rec.enc = penc.substr(0, penc.size() - 1) + "," + std::to_string(base) + "]";
  }
  rec.len = parent.length + 1;
  rec.ft_id = parent.id;
  std::uint64_t pn = point_count(parent);
  rec.npts = pn * fs;
  rec.parent.resize(rec.npts);
  rec.elt.resize(rec.npts);
  rec.offset.resize(pn + 1);
  for (std::uint64_t p = 0; p <= pn; ++p) rec.offset[p] = p * fs;
  for (std::uint64_t i = 0; i < rec.npts; ++i) {
    rec.parent[i] = static_cast<std::uint32_t>(i / fs);
    rec.elt[i] = static_cast<std::uint32_t>(i % fs);
  }
  std::uint32_t id = intern_ob(std::move(rec));
  {
    std::lock_guard<std::mutex> lock(tuples_mu_);
    if (id >= tuples_.size()) tuples_.resize(id + 1);
    tuples_[id] = std::move(tuple);
  }
  return ObHandle{id, parent.length + 1};
}

ObHandle ContextCS::object_of(const std::vector<std::uint32_t>& bases) const {
  ObHandle cur = pt();
  for (std::uint32_t b : bases) {
    if (b >= base_sizes_.size()) throw domain_error("context: base index out of range");
    cur = extend(cur, b);
  }
  return cur;
}

std::vector<ObHandle> ContextCS::enum_objects(std::uint32_t max_len, const Budget& b,
                                              bool* truncated) const {
  if (truncated) *truncated = false;
  std::vector<ObHandle> out{pt()};
  std::vector<ObHandle> level{pt()};
  for (std::uint32_t n = 1; n <= max_len; ++n) {
    std::vector<ObHandle> next;
    for (ObHandle parent : level) {
      for (std::uint32_t base = 0; base < base_sizes_.size(); ++base) {
        if (point_count(parent) * base_sizes_[base] > b.point_cap) {
          if (truncated) *truncated = true;
          continue;
        }
        next.push_back(extend(parent, base));
      }
    }
    for (ObHandle h : next) out.push_back(h);
    level = std::move(next);
  }
  return out;
}

std::optional<ObHandle> ContextCS::ob_from_encoding(const std::string& enc) const {
  auto j = nlohmann::json::parse(enc, nullptr, false);
  if (!j.is_array()) return std::nullopt;
  std::vector<std::uint32_t> bases;
  for (const auto& v : j) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() >= base_sizes_.size())
      return std::nullopt;
    bases.push_back(v.get<std::uint32_t>());
  }
  return object_of(bases);
}

ObHandle ContextCS::do_star(MorHandle f, ObHandle x) const {
  std::vector<std::uint32_t> t = tuple_of(x);
  return extend(f.src, t.back());
}

// ---------------------------------------------------------------------------
// UniverseCS

UniverseCS::UniverseCS(std::vector<std::uint32_t> el_sizes) : el_sizes_(std::move(el_sizes)) {
  if (el_sizes_.empty()) throw domain_error("universe: els must be nonempty");
  ObRec pt_rec;
  pt_rec.enc = "[]";
  pt_rec.len = 0;
  pt_rec.ft_id = 0;
  pt_rec.npts = 1;
  intern_ob(std::move(pt_rec));
}

nlohmann::json UniverseCS::config_json() const {
  return {{"kind", "universe"}, {"els", el_sizes_}};
}

ObHandle UniverseCS::do_pt() const { return handle_of(0); }

ObHandle UniverseCS::extend(ObHandle x, const std::vector<std::uint32_t>& family) const {
  std::uint64_t pn = point_count(x);
  if (family.size() != pn) throw domain_error("universe: family size must match point count");
  for (std::uint32_t code : family)
    if (code >= el_sizes_.size()) throw domain_error("universe: code out of range");

  ObRec rec;
  std::string penc = ob_encoding(x);
  std::string fenc = table_json(family);
  if (penc == "[]") {
    rec.enc = "[" + fenc + "]";
  } else {
    rec.enc = penc.substr(0, penc.size() - 1) + "," + fenc + "]";
  }
  rec.len = x.length + 1;
  rec.ft_id = x.id;
  rec.offset.resize(pn + 1);
  rec.offset[0] = 0;
  for (std::uint64_t p = 0; p < pn; ++p)
    rec.offset[p + 1] = rec.offset[p] + el_sizes_[family[p]];
  rec.npts = rec.offset[pn];
  rec.parent.resize(rec.npts);
  rec.elt.resize(rec.npts);
  for (std::uint64_t p = 0; p < pn; ++p) {
    for (std::uint64_t e = 0; e < el_sizes_[family[p]]; ++e) {
      rec.parent[rec.offset[p] + e] = static_cast<std::uint32_t>(p);
      rec.elt[rec.offset[p] + e] = static_cast<std::uint32_t>(e);
    }
  }
  std::uint32_t id = intern_ob(std::move(rec));
  {
    std::lock_guard<std::mutex> lock(fam_mu_);
    if (id >= families_.size()) families_.resize(id + 1);
    families_[id] = family;
  }
  return ObHandle{id, x.length + 1};
}

std::vector<ObHandle> UniverseCS::enum_objects(std::uint32_t max_len, const Budget& b,
                                               bool* truncated) const {
  if (truncated) *truncated = false;
  std::vector<ObHandle> out{pt()};
  std::vector<ObHandle> level{pt()};
  const std::uint64_t k = el_sizes_.size();
  for (std::uint32_t n = 1; n <= max_len; ++n) {
    std::vector<ObHandle> next;
    for (ObHandle parent : level) {
      std::uint64_t pn = point_count(parent);
      std::uint64_t nfam = 1;
      bool exhaustive = true;
      for (std::uint64_t i = 0; i < pn; ++i) {
        nfam *= k;
        if (nfam > b.hom_cap) {
          exhaustive = false;
          break;
        }
      }
      if (!exhaustive) {
        if (truncated) *truncated = true;
        continue;
      }
      std::vector<std::uint32_t> family(pn, 0);
      for (std::uint64_t f = 0; f < nfam; ++f) {
        ObHandle child = extend(parent, family);
        if (point_count(child) > b.point_cap) {
          if (truncated) *truncated = true;
        } else {
          next.push_back(child);
        }
        for (std::size_t i = family.size(); i-- > 0;) {
          if (++family[i] < k) break;
          family[i] = 0;
        }
        if (pn == 0) break;  // single empty family
      }
    }
    for (ObHandle h : next) out.push_back(h);
    level = std::move(next);
  }
  return out;
}

std::optional<ObHandle> UniverseCS::ob_from_encoding(const std::string& enc) const {
  auto j = nlohmann::json::parse(enc, nullptr, false);
  if (!j.is_array()) return std::nullopt;
  ObHandle cur = pt();
  for (const auto& fam : j) {
    if (!fam.is_array()) return std::nullopt;
    std::vector<std::uint32_t> family;
    for (const auto& v : fam) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() >= el_sizes_.size())
        return std::nullopt;
      family.push_back(v.get<std::uint32_t>());
    }
    if (family.size() != point_count(cur)) return std::nullopt;
    cur = extend(cur, family);
  }
  return cur;
}

ObHandle UniverseCS::do_star(MorHandle f, ObHandle x) const {
  std::vector<std::uint32_t> fam;
  {
    std::lock_guard<std::mutex> lock(fam_mu_);
    fam = families_[x.id];
  }
  const std::vector<std::uint32_t>& ftable = mor_table(f);
  std::vector<std::uint32_t> composed(ftable.size());
  for (std::size_t y = 0; y < ftable.size(); ++y) composed[y] = fam[ftable[y]];
  return extend(f.src, composed);
}

// ---------------------------------------------------------------------------
// MutatedCS

MutatedCS::MutatedCS(CSystemPtr base, Target target) : base_(std::move(base)), target_(target) {}

std::optional<MutatedCS::Target> MutatedCS::target_from_name(const std::string& name) {
  if (name == "permute_q") return Target::Q;
  if (name == "permute_sf") return Target::Sf;
  if (name == "permute_star") return Target::Star;
  if (name == "permute_comp") return Target::Comp;
  return std::nullopt;
}

std::string MutatedCS::target_name(Target t) {
  switch (t) {
    case Target::Q: return "permute_q";
    case Target::Sf: return "permute_sf";
    case Target::Star: return "permute_star";
    case Target::Comp: return "permute_comp";
  }
  return "?";
}

std::string MutatedCS::kind() const { return "mutated(" + base_->kind() + ")"; }

nlohmann::json MutatedCS::config_json() const {
  return {{"kind", "mutated"}, {"base", base_->config_json()}, {"mutation", target_name(target_)}};
}

MorHandle MutatedCS::next_parallel(MorHandle m) const {
  HomSet hs = base_->enum_hom(m.src, m.tgt, Budget{});
  auto it = std::find(hs.mors.begin(), hs.mors.end(), m);
  if (it == hs.mors.end() || hs.mors.size() < 2) return m;
  std::size_t i = static_cast<std::size_t>(it - hs.mors.begin());
  return hs.mors[(i + 1) % hs.mors.size()];
}

ObHandle MutatedCS::do_star(MorHandle f, ObHandle x) const {
  ObHandle s = base_->star(f, x);
  if (target_ != Target::Star) return s;
  // Cyclically-next object with the same ft and length, when one exists.
  bool trunc = false;
  Budget b;
  b.point_cap = 64;
  std::vector<ObHandle> objs = base_->enum_objects(s.length, b, &trunc);
  std::vector<ObHandle> candidates;
  for (ObHandle o : objs)
    if (o.length == s.length && base_->ft(o) == f.src) candidates.push_back(o);
  auto it = std::find(candidates.begin(), candidates.end(), s);
  if (it == candidates.end() || candidates.size() < 2) return s;
  std::size_t i = static_cast<std::size_t>(it - candidates.begin());
  return candidates[(i + 1) % candidates.size()];
}

MorHandle MutatedCS::do_q(MorHandle f, ObHandle x) const {
  MorHandle m = base_->q_map(f, x);
  if (target_ != Target::Q) return m;
  return next_parallel(m);
}

MorHandle MutatedCS::do_comp(MorHandle f, MorHandle g) const {
  MorHandle m = base_->compose(f, g);
  if (target_ != Target::Comp) return m;
  return next_parallel(m);
}

MorHandle MutatedCS::do_sf(MorHandle f) const {
  Section s = base_->section_of(f);
  if (target_ != Target::Sf) return s.mor;
  // Cycle among the sections of the same projection.
  bool trunc = false;
  std::vector<Section> sects = base_->enum_sections(s.target(), Budget{}, &trunc);
  auto it = std::find(sects.begin(), sects.end(), s);
  if (it == sects.end() || sects.size() < 2) return s.mor;
  std::size_t i = static_cast<std::size_t>(it - sects.begin());
  return sects[(i + 1) % sects.size()].mor;
}

std::vector<MorHandle> MutatedCS::do_enum_sections(ObHandle x, const Budget& b,
                                                   bool* truncated) const {
  std::vector<Section> sects = base_->enum_sections(x, b, truncated);
  std::vector<MorHandle> out;
  for (const Section& s : sects) out.push_back(s.mor);
  return out;
}

// ---------------------------------------------------------------------------
// Factory

CSystemPtr make_instance(const nlohmann::json& config) {
  if (!config.is_object() || !config.contains("kind") || !config["kind"].is_string())
    throw domain_error("instance config: missing \"kind\"");
  const std::string k = config["kind"].get<std::string>();
  if (k == "unit") return std::make_shared<UnitCS>();
  if (k == "context") {
    if (!config.contains("base_sizes") || !config["base_sizes"].is_array())
      throw domain_error("instance config: context requires \"base_sizes\"");
    return std::make_shared<ContextCS>(config["base_sizes"].get<std::vector<std::uint32_t>>());
  }
  if (k == "universe") {
    if (!config.contains("els") || !config["els"].is_array())
      throw domain_error("instance config: universe requires \"els\"");
    return std::make_shared<UniverseCS>(config["els"].get<std::vector<std::uint32_t>>());
  }
  if (k == "mutated") {
    if (!config.contains("base") || !config.contains("mutation"))
      throw domain_error("instance config: mutated requires \"base\" and \"mutation\"");
    auto target = MutatedCS::target_from_name(config["mutation"].get<std::string>());
    if (!target) throw domain_error("instance config: unknown mutation");
    return std::make_shared<MutatedCS>(make_instance(config["base"]), *target);
  }
  throw domain_error("instance config: unknown kind \"" + k + "\"");
}

}  // namespace csys
