#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eprldpc/sim.hpp"

namespace eprldpc {

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::string next(const std::string& section) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            return line;
        }
        throw std::runtime_error("qalist parse error at line " + std::to_string(line_no_) +
                                 ": unexpected end of file in section " + section);
    }

    int line_no() const { return line_no_; }

private:
    std::istream& in_;
    int line_no_ = 0;
};

[[noreturn]] void fail(const LineReader& r, const std::string& section, const std::string& what) {
    throw std::runtime_error("qalist parse error at line " + std::to_string(r.line_no()) + " (" + section +
                             "): " + what);
}

} // namespace

std::string qalist_to_string(const CodeSpec& spec) {
    std::ostringstream os;
    const auto& ctx = *spec.ctx;
    os << "qalist 1\n";
    os << "p " << ctx.p() << "\n";
    os << "primpoly " << ctx.prim_poly() << "\n";
    os << "M " << spec.h.n_chk << "\n";
    os << "N " << spec.h.n_sym << "\n";
    os << "gs " << spec.target_girth << "\n";
    os << "mode " << (spec.default_mode == TransmitMode::base ? "base" : "extended") << "\n";
    os << "H\n";
    for (int i = 0; i < spec.h.n_chk; ++i) {
        bool first = true;
        for (const auto& [j, v] : spec.h.rows[i]) {
            if (!first) os << ' ';
            os << (j + 1) << ':' << ctx.log(v);
            first = false;
        }
        os << "\n";
    }
    os << "GENERATORS\n";
    const int qm1 = ctx.q() - 1;
    for (const auto& g : spec.gens.gens) {
        if (g.weight() == qm1) {
            os << "*\n";
            continue;
        }
        bool first = true;
        for (int c = 0; c < qm1; ++c) {
            if (!g.active[c]) continue;
            if (!first) os << ' ';
            os << (c + 1);
            first = false;
        }
        os << "\n";
    }
    os << "OMEGA_E\n";
    os << spec.omega_e.matrix.n_rows() << ' ' << spec.omega_e.matrix.n_cols() << "\n";
    for (int r = 0; r < spec.omega_e.matrix.n_rows(); ++r) {
        const auto& tag = spec.omega_e.tags[r];
        switch (tag.kind) {
            case EPRMatrix::RowKind::omega:
                os << "w " << (tag.check + 1) << ' ' << (tag.row + 1);
                break;
            case EPRMatrix::RowKind::addition:
                os << "a " << (tag.check + 1) << ' ' << (tag.row + 1) << ' ' << (tag.check2 + 1) << ' '
                   << (tag.row2 + 1);
                break;
            case EPRMatrix::RowKind::replacement:
                os << "b " << tag.block_id;
                break;
        }
        for (int c : spec.omega_e.matrix.row(r)) os << ' ' << (c + 1);
        os << "\n";
    }
    os << "END\n";
    return os.str();
}

void write_qalist(const CodeSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << qalist_to_string(spec);
}

CodeSpec qalist_from_string(const std::string& text) {
    std::istringstream in(text);
    LineReader r(in);
    auto expect_kv = [&](const std::string& key) {
        auto line = r.next("header");
        std::istringstream ls(line);
        std::string k;
        long long v;
        if (!(ls >> k >> v) || k != key) fail(r, "header", "expected '" + key + " <int>'");
        return v;
    };
    {
        auto line = r.next("header");
        if (line != "qalist 1") throw std::runtime_error("qalist parse error at line 1 (header): bad magic");
    }
    int p = static_cast<int>(expect_kv("p"));
    uint32_t poly = static_cast<uint32_t>(expect_kv("primpoly"));
    int m = static_cast<int>(expect_kv("M"));
    int n = static_cast<int>(expect_kv("N"));
    int gs = static_cast<int>(expect_kv("gs"));
    TransmitMode mode;
    {
        auto line = r.next("header");
        std::istringstream ls(line);
        std::string k, v;
        if (!(ls >> k >> v) || k != "mode" || (v != "base" && v != "extended"))
            fail(r, "header", "expected 'mode base|extended'");
        mode = v == "base" ? TransmitMode::base : TransmitMode::extended;
    }
    auto ctx = std::make_shared<FieldContext>(p, poly);
    const int qm1 = ctx->q() - 1;

    if (r.next("H") != "H") fail(r, "H", "expected section marker 'H'");
    NonBinaryMatrix h;
    h.ctx = ctx;
    h.n_chk = m;
    h.n_sym = n;
    h.rows.resize(m);
    for (int i = 0; i < m; ++i) {
        auto line = r.next("H");
        std::istringstream ls(line);
        std::string pair;
        while (ls >> pair) {
            auto colon = pair.find(':');
            if (colon == std::string::npos) fail(r, "H", "expected col:exp, got '" + pair + "'");
            int col = std::stoi(pair.substr(0, colon));
            int e = std::stoi(pair.substr(colon + 1));
            if (col < 1 || col > n) fail(r, "H", "column out of range");
            if (e < 0 || e >= qm1) fail(r, "H", "exponent out of range");
            h.set(i, col - 1, ctx->pow_alpha(e));
        }
    }

    if (r.next("GENERATORS") != "GENERATORS") fail(r, "GENERATORS", "expected section marker");
    GeneratorSet gens;
    gens.q = ctx->q();
    gens.gens.resize(n);
    for (int j = 0; j < n; ++j) {
        gens.gens[j].symbol = j;
        gens.gens[j].active.assign(qm1, 0);
        auto line = r.next("GENERATORS");
        if (line == "*") {
            gens.gens[j].active.assign(qm1, 1);
            continue;
        }
        std::istringstream ls(line);
        int v;
        while (ls >> v) {
            if (v < 1 || v > qm1) fail(r, "GENERATORS", "active value out of range");
            gens.gens[j].active[v - 1] = 1;
        }
    }

    if (r.next("OMEGA_E") != "OMEGA_E") fail(r, "OMEGA_E", "expected section marker");
    int n_rows, n_cols;
    {
        std::istringstream ls(r.next("OMEGA_E"));
        if (!(ls >> n_rows >> n_cols) || n_cols != n * qm1) fail(r, "OMEGA_E", "bad dimensions");
    }
    EPRMatrix epr;
    epr.q = ctx->q();
    epr.col_blocks = BlockStructure{m, n, qm1, qm1};
    epr.matrix = BitMatrix(n_rows, n_cols);
    gens.kept_rows.assign(m, {});
    for (int row = 0; row < n_rows; ++row) {
        auto line = r.next("OMEGA_E");
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        EPRMatrix::RowTag tag{};
        if (kind == "w") {
            int chk, lr;
            if (!(ls >> chk >> lr)) fail(r, "OMEGA_E", "bad omega tag");
            tag = {EPRMatrix::RowKind::omega, chk - 1, lr - 1, -1, -1, -1};
            if (chk < 1 || chk > m || lr < 1 || lr > qm1) fail(r, "OMEGA_E", "omega tag out of range");
            gens.kept_rows[chk - 1].push_back(lr - 1);
        } else if (kind == "a") {
            int chk, lr, chk2, lr2;
            if (!(ls >> chk >> lr >> chk2 >> lr2)) fail(r, "OMEGA_E", "bad addition tag");
            tag = {EPRMatrix::RowKind::addition, chk - 1, lr - 1, chk2 - 1, lr2 - 1, -1};
        } else if (kind == "b") {
            int id;
            if (!(ls >> id)) fail(r, "OMEGA_E", "bad replacement tag");
            tag = {EPRMatrix::RowKind::replacement, -1, -1, -1, -1, id};
        } else {
            fail(r, "OMEGA_E", "unknown row tag '" + kind + "'");
        }
        std::vector<int> cols;
        int c;
        while (ls >> c) {
            if (c < 1 || c > n_cols) fail(r, "OMEGA_E", "column out of range");
            cols.push_back(c - 1);
        }
        epr.matrix.set_row(row, std::move(cols));
        epr.tags.push_back(tag);
    }
    if (r.next("END") != "END") fail(r, "END", "expected END marker");
    for (auto& rows : gens.kept_rows) std::sort(rows.begin(), rows.end());

    CodeSpec spec = make_code_spec(ctx, h, gs, mode);
    // overwrite the trivial selection with the stored extended matrix
    epr.active.assign(static_cast<size_t>(n) * qm1, 0);
    for (int j = 0; j < n; ++j)
        for (int c = 0; c < qm1; ++c) epr.active[static_cast<size_t>(j) * qm1 + c] = gens.gens[j].active[c];
    epr.perms.assign(m, std::vector<std::vector<int16_t>>(n));
    for (int i = 0; i < m; ++i)
        for (const auto& [j, l] : spec.img.labels[i]) epr.perms[i][j].assign(qm1, -1);
    for (const auto& tag : epr.tags) {
        if (tag.kind != EPRMatrix::RowKind::omega) continue;
        for (const auto& [j, l] : spec.img.labels[tag.check]) {
            auto perm = f_omega_perm(l, ctx->q());
            epr.perms[tag.check][j][tag.row] = perm[tag.row];
        }
    }
    spec.omega_e = std::move(epr);
    spec.gens = std::move(gens);
    spec.rank_omega_e = rank_f2(spec.omega_e.matrix);
    return spec;
}

CodeSpec read_qalist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return qalist_from_string(buf.str());
}

} // namespace eprldpc
