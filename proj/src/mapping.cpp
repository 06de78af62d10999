#include "xbarsim/mapping.hpp"

#include <cmath>
#include <numeric>

namespace xbarsim {

namespace {

bool input_bit(InputBit comp, int x) {
    switch (comp) {
    case InputBit::Pos: return x > 0;
    case InputBit::Neg: return x < 0;
    case InputBit::TcLow: return x != 0;
    case InputBit::TcHigh: return x < 0;
    case InputBit::OffLow: return x == 0;
    case InputBit::OffHigh: return x > 0;
    }
    return false;
}

// Weight cell planes.
bool g_pos(int w) { return w > 0; }
bool g_neg(int w) { return w < 0; }
bool g_tc_low(int w) { return w != 0; }  // w = g0 - 2*g1
bool g_tc_high(int w) { return w < 0; }
bool g_off_low(int w) { return w == 0; } // w + 1 = 2*g1 + g0
bool g_off_high(int w) { return w > 0; }

SchemeLayout build_layout(MappingKind kind, MappingVariant variant) {
    using IB = InputBit;
    SchemeLayout l;
    const bool cells = variant == MappingVariant::MoreCells;
    switch (kind) {
    case MappingKind::BnnI:
        l.cols_per_output = 2;
        l.scale_num = 2;
        l.passes = {{IB::Pos, {{0, 1, +1}}}};
        break;
    case MappingKind::BnnII:
        l.cols_per_output = 2;
        l.scale_num = 2;
        l.passes = {{IB::Neg, {{1, 0, +1}}}};
        break;
    case MappingKind::BnnIII:
        l.scale_num = 2;
        if (cells) {
            l.row_blocks = 2;
            l.cols_per_output = 2;
            l.block_components = {IB::Pos, IB::Neg};
            l.passes = {{IB::Pos, {{0, -1, +1}, {1, -1, -1}}}};
        } else {
            l.cols_per_output = 1;
            l.passes = {{IB::Pos, {{0, -1, +1}}}, {IB::Neg, {{0, -1, -1}}}};
        }
        break;
    case MappingKind::BnnIV:
        l.scale_num = 2;
        if (cells) {
            l.row_blocks = 2;
            l.cols_per_output = 2;
            l.block_components = {IB::Pos, IB::Neg};
            l.passes = {{IB::Pos, {{0, -1, -1}, {1, -1, +1}}}};
        } else {
            l.cols_per_output = 1;
            l.passes = {{IB::Pos, {{0, -1, -1}}}, {IB::Neg, {{0, -1, +1}}}};
        }
        break;
    case MappingKind::BnnV:
        l.row_blocks = 2;
        l.cols_per_output = 1;
        l.scale_num = 2;
        l.block_components = {IB::Pos, IB::Neg};
        l.passes = {{IB::Pos, {{0, -1, +1}}}};
        break;
    case MappingKind::BnnVI:
    case MappingKind::TnnI:
        l.cols_per_output = 2;
        l.scale_num = 1;
        if (cells) {
            l.row_blocks = 2;
            l.block_components = {IB::Pos, IB::Neg};
            l.passes = {{IB::Pos, {{0, 1, +1}}}};
        } else {
            l.passes = {{IB::Pos, {{0, 1, +1}}}, {IB::Neg, {{0, 1, -1}}}};
        }
        break;
    case MappingKind::TnnII:
        l.scale_num = 1;
        if (cells) {
            l.row_blocks = 2;
            l.cols_per_output = 4;
            l.block_components = {IB::TcLow, IB::TcHigh};
            l.passes = {{IB::TcLow, {{0, 1, +1}, {2, 3, -2}}}};
        } else {
            l.cols_per_output = 2;
            l.passes = {{IB::TcLow, {{0, 1, +1}}}, {IB::TcHigh, {{0, 1, -2}}}};
        }
        break;
    case MappingKind::TnnIII:
        l.scale_num = 1;
        if (cells) {
            l.row_blocks = 2;
            l.cols_per_output = 4;
            l.block_components = {IB::OffLow, IB::OffHigh};
            l.passes = {{IB::OffLow, {{0, 1, +1}, {2, 3, +2}}}};
        } else {
            l.cols_per_output = 2;
            l.passes = {{IB::OffLow, {{0, 1, +1}}}, {IB::OffHigh, {{0, 1, +2}}}};
        }
        break;
    case MappingKind::TnnIV:
        l.scale_num = 1;
        if (cells) {
            l.row_blocks = 2;
            l.cols_per_output = 4;
            l.block_components = {IB::Pos, IB::Neg};
            l.passes = {{IB::Pos, {{0, -1, +1}, {1, -1, -2}, {2, -1, -1}, {3, -1, +2}}}};
        } else {
            l.cols_per_output = 2;
            l.passes = {{IB::Pos, {{0, -1, +1}, {1, -1, -2}}},
                        {IB::Neg, {{0, -1, -1}, {1, -1, +2}}}};
        }
        break;
    case MappingKind::TnnV:
        l.scale_num = 1;
        if (cells) {
            l.row_blocks = 2;
            l.cols_per_output = 4;
            l.block_components = {IB::Pos, IB::Neg};
            l.passes = {{IB::Pos, {{0, -1, +1}, {1, -1, +2}, {2, -1, -1}, {3, -1, -2}}}};
        } else {
            l.cols_per_output = 2;
            l.passes = {{IB::Pos, {{0, -1, +1}, {1, -1, +2}}},
                        {IB::Neg, {{0, -1, -1}, {1, -1, -2}}}};
        }
        break;
    }
    return l;
}

struct NameEntry {
    const char* base;
    MappingKind kind;
};

constexpr NameEntry kNames[] = {
    {"bnn-i", MappingKind::BnnI},     {"bnn-ii", MappingKind::BnnII},
    {"bnn-iii", MappingKind::BnnIII}, {"bnn-iv", MappingKind::BnnIV},
    {"bnn-v", MappingKind::BnnV},     {"bnn-vi", MappingKind::BnnVI},
    {"tnn-i", MappingKind::TnnI},     {"tnn-ii", MappingKind::TnnII},
    {"tnn-iii", MappingKind::TnnIII}, {"tnn-iv", MappingKind::TnnIV},
    {"tnn-v", MappingKind::TnnV},
};

const char* base_name(MappingKind kind) {
    for (const auto& e : kNames)
        if (e.kind == kind)
            return e.base;
    return "?";
}

} // namespace

MappingScheme::MappingScheme(MappingKind kind, MappingVariant variant)
    : kind_(kind), variant_(variant) {
    if (!has_variants())
        variant_ = MappingVariant::MoreCells; // normalized; the table lists one realization
    layout_ = build_layout(kind_, variant_);
}

bool MappingScheme::has_variants() const {
    switch (kind_) {
    case MappingKind::BnnI:
    case MappingKind::BnnII:
    case MappingKind::BnnV:
        return false;
    default:
        return true;
    }
}

bool MappingScheme::ternary() const {
    switch (kind_) {
    case MappingKind::TnnI:
    case MappingKind::TnnII:
    case MappingKind::TnnIII:
    case MappingKind::TnnIV:
    case MappingKind::TnnV:
        return true;
    default:
        return false;
    }
}

int MappingScheme::cycles() const { return passes(); }

int MappingScheme::cells_per_weight() const {
    switch (kind_) {
    case MappingKind::BnnI:
    case MappingKind::BnnII:
    case MappingKind::BnnV:
        return 2;
    case MappingKind::BnnIII:
    case MappingKind::BnnIV:
        return variant_ == MappingVariant::MoreCells ? 2 : 1;
    case MappingKind::BnnVI:
    case MappingKind::TnnI:
    case MappingKind::TnnII:
    case MappingKind::TnnIII:
    case MappingKind::TnnIV:
    case MappingKind::TnnV:
        return variant_ == MappingVariant::MoreCells ? 4 : 2;
    }
    return 0;
}

std::string MappingScheme::name() const {
    std::string n = base_name(kind_);
    if (has_variants())
        n += variant_ == MappingVariant::MoreCells ? "+cells" : "+cycles";
    return n;
}

MappingScheme MappingScheme::from_name(const std::string& name) {
    std::string base = name;
    MappingVariant variant = MappingVariant::MoreCells;
    bool explicit_variant = false;
    if (auto pos = name.rfind("+cells"); pos != std::string::npos && pos + 6 == name.size()) {
        base = name.substr(0, pos);
        explicit_variant = true;
    } else if (auto p = name.rfind("+cycles"); p != std::string::npos && p + 7 == name.size()) {
        base = name.substr(0, p);
        variant = MappingVariant::MoreCycles;
        explicit_variant = true;
    }
    for (const auto& e : kNames) {
        if (base == e.base) {
            MappingScheme s(e.kind, variant);
            if (explicit_variant && !s.has_variants())
                throw ConfigError("mapping '" + base + "' has a single realization; drop the variant suffix");
            return s;
        }
    }
    std::string valid;
    for (const auto& n : known_names())
        valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown mapping '" + name + "'; valid names: " + valid);
}

std::vector<std::string> MappingScheme::known_names() {
    std::vector<std::string> out;
    for (const auto& e : kNames) {
        MappingScheme s(e.kind);
        if (s.has_variants()) {
            out.push_back(std::string(e.base) + "+cells");
            out.push_back(std::string(e.base) + "+cycles");
        } else {
            out.push_back(e.base);
        }
    }
    return out;
}

std::vector<MappingScheme> MappingScheme::all_schemes() {
    std::vector<MappingScheme> out;
    for (const auto& n : known_names())
        out.push_back(from_name(n));
    return out;
}

namespace {

// Fills the physical cell pattern for weight w(m, i). Physical row layout is
// block-major: row(b, i) = b * n + i; output m owns columns
// [m*cpo, (m+1)*cpo).
void fill_cells(const MappingScheme& scheme, const IntMatrix& w, BitMatrix& cells) {
    const MappingKind kind = scheme.kind();
    const bool more_cells = scheme.variant() == MappingVariant::MoreCells;
    const int cpo = scheme.cols_per_output();
    const int n = w.cols;
    for (int m = 0; m < w.rows; ++m) {
        const int c0 = m * cpo;
        for (int i = 0; i < n; ++i) {
            const int wv = w.at(m, i);
            auto set = [&](int block, int col, bool v) {
                if (v)
                    cells.at(block * n + i, c0 + col) = 1;
            };
            switch (kind) {
            case MappingKind::BnnI:
            case MappingKind::BnnII:
                set(0, 0, g_pos(wv));
                set(0, 1, g_neg(wv));
                break;
            case MappingKind::BnnIII:
                set(0, 0, g_pos(wv));
                if (more_cells)
                    set(1, 1, g_pos(wv));
                break;
            case MappingKind::BnnIV:
                // Complement plane: the pass coefficients are derived for g-.
                set(0, 0, g_neg(wv));
                if (more_cells)
                    set(1, 1, g_neg(wv));
                break;
            case MappingKind::BnnV:
                set(0, 0, g_pos(wv));
                set(1, 0, g_neg(wv));
                break;
            case MappingKind::BnnVI:
            case MappingKind::TnnI:
                set(0, 0, g_pos(wv));
                set(0, 1, g_neg(wv));
                if (more_cells) { // second block with swapped column roles
                    set(1, 0, g_neg(wv));
                    set(1, 1, g_pos(wv));
                }
                break;
            case MappingKind::TnnII:
            case MappingKind::TnnIII:
                set(0, 0, g_pos(wv));
                set(0, 1, g_neg(wv));
                if (more_cells) {
                    set(1, 2, g_pos(wv));
                    set(1, 3, g_neg(wv));
                }
                break;
            case MappingKind::TnnIV:
                set(0, 0, g_tc_low(wv));
                set(0, 1, g_tc_high(wv));
                if (more_cells) {
                    set(1, 2, g_tc_low(wv));
                    set(1, 3, g_tc_high(wv));
                }
                break;
            case MappingKind::TnnV:
                set(0, 0, g_off_low(wv));
                set(0, 1, g_off_high(wv));
                if (more_cells) {
                    set(1, 2, g_off_low(wv));
                    set(1, 3, g_off_high(wv));
                }
                break;
            }
        }
    }
}

void check_alphabet(int x, bool ternary, const char* what) {
    const bool ok = ternary ? (x >= -1 && x <= 1) : (x == -1 || x == 1);
    if (!ok)
        throw EncodingError(std::string(what) + " value " + std::to_string(x) +
                            " outside the " + (ternary ? "ternary" : "binary") + " alphabet");
}

CorrectionSpec build_correction(const MappingScheme& scheme, const IntMatrix& w) {
    CorrectionSpec c;
    auto row_sums = [&](int sign) {
        std::vector<long long> s(static_cast<std::size_t>(w.rows), 0);
        for (int m = 0; m < w.rows; ++m)
            for (int i = 0; i < w.cols; ++i)
                s[static_cast<std::size_t>(m)] += sign * w.at(m, i);
        return s;
    };
    switch (scheme.kind()) {
    case MappingKind::BnnI:
        c.row_const = row_sums(-1);
        c.const_excludes_zero_inputs = true;
        break;
    case MappingKind::BnnII:
        c.row_const = row_sums(+1);
        c.const_excludes_zero_inputs = true;
        break;
    case MappingKind::BnnIII:
        c.input_sum_coeff = -1;
        break;
    case MappingKind::BnnIV:
        c.input_sum_coeff = +1;
        break;
    case MappingKind::BnnV:
        c.nonzero_count_coeff = -1;
        break;
    case MappingKind::TnnIII:
        c.row_const = row_sums(-1);
        break;
    case MappingKind::TnnV:
        c.input_sum_coeff = -1;
        break;
    default:
        break;
    }
    return c;
}

} // namespace

DigitalPlan encode_weights(const IntMatrix& w, const MappingScheme& scheme) {
    for (int m = 0; m < w.rows; ++m)
        for (int i = 0; i < w.cols; ++i)
            check_alphabet(w.at(m, i), scheme.ternary(), "weight");
    DigitalPlan plan;
    plan.scheme = scheme;
    plan.m = w.rows;
    plan.n = w.cols;
    plan.cell_targets = BitMatrix(w.cols * scheme.row_blocks(), w.rows * scheme.cols_per_output());
    fill_cells(scheme, w, plan.cell_targets);
    plan.weights = w;
    plan.correction = build_correction(scheme, w);
    return plan;
}

EncodedInput encode_inputs(std::span<const int> v, const MappingScheme& scheme) {
    const bool ternary = scheme.ternary();
    for (int x : v) {
        // 0 is additionally tolerated for BNN kinds as an inert padding value.
        if (!(x >= -1 && x <= 1))
            check_alphabet(x, ternary, "input");
    }
    const SchemeLayout& l = scheme.layout();
    const int n = static_cast<int>(v.size());
    EncodedInput enc;
    enc.n = n;
    for (int i = 0; i < n; ++i) {
        enc.input_sum += v[static_cast<std::size_t>(i)];
        if (v[static_cast<std::size_t>(i)] != 0)
            ++enc.nonzero;
        else
            enc.zero_positions.push_back(i);
    }
    if (l.row_blocks > 1) {
        std::vector<std::uint8_t> drive(static_cast<std::size_t>(n) * l.row_blocks, 0);
        for (int b = 0; b < l.row_blocks; ++b)
            for (int i = 0; i < n; ++i)
                drive[static_cast<std::size_t>(b) * n + i] =
                    input_bit(l.block_components[static_cast<std::size_t>(b)], v[static_cast<std::size_t>(i)]);
        enc.drives.push_back(std::move(drive));
    } else {
        for (const PassSpec& pass : l.passes) {
            std::vector<std::uint8_t> drive(static_cast<std::size_t>(n), 0);
            for (int i = 0; i < n; ++i)
                drive[static_cast<std::size_t>(i)] = input_bit(pass.component, v[static_cast<std::size_t>(i)]);
            enc.drives.push_back(std::move(drive));
        }
    }
    return enc;
}

IntMatrix decode_weights(const DigitalPlan& plan) {
    const MappingScheme& s = plan.scheme;
    const int cpo = s.cols_per_output();
    IntMatrix w(plan.m, plan.n);
    for (int m = 0; m < plan.m; ++m) {
        for (int i = 0; i < plan.n; ++i) {
            const int c0 = m * cpo;
            const int b0 = plan.cell_targets.at(i, c0);
            const int b1 = cpo > 1 ? plan.cell_targets.at(i, c0 + 1) : 0;
            int wv = 0;
            switch (s.kind()) {
            case MappingKind::BnnI:
            case MappingKind::BnnII:
            case MappingKind::BnnVI:
            case MappingKind::TnnI:
            case MappingKind::TnnII:
            case MappingKind::TnnIII:
                wv = b0 - b1; // w = gD+ - gD-
                break;
            case MappingKind::BnnIII:
                wv = 2 * b0 - 1;
                break;
            case MappingKind::BnnIV:
                wv = 1 - 2 * b0; // complement plane
                break;
            case MappingKind::BnnV:
                wv = b0 ? 1 : -1; // gD+ plane; complement lives in block 1
                break;
            case MappingKind::TnnIV:
                wv = b0 - 2 * b1; // (gD1, gD0) two's complement
                break;
            case MappingKind::TnnV:
                wv = 2 * b1 + b0 - 1; // w + 1 = (gD1, gD0)
                break;
            }
            w.at(m, i) = wv;
        }
    }
    return w;
}

std::vector<long long> mvm_on_crossbar(const DigitalPlan& plan, const EncodedInput& in,
                                       const Crossbar& xbar, const MvmOptions& opts) {
    const MappingScheme& scheme = plan.scheme;
    const SchemeLayout& l = scheme.layout();
    const CrossbarConfig& cfg = xbar.config();
    const AnalogTile& tile = xbar.tile();
    if (in.n != plan.n)
        throw ShapeError("input length " + std::to_string(in.n) + " != plan n " + std::to_string(plan.n));
    if (tile.rows_used != plan.cell_targets.rows || tile.cols_used != plan.cell_targets.cols)
        throw ShapeError("plan does not match the programmed crossbar tile");
    if (static_cast<int>(in.drives.size()) != scheme.passes())
        throw ShapeError("encoded input pass count mismatch");

    const double i_mm = cfg.i_mm();
    const double i_max_diff = plan.n * i_mm;
    const double i_max_se = plan.n * cfg.i_lrs;
    AdcConfig adc_diff = cfg.adc;
    adc_diff.mode = AdcMode::Differential;
    AdcConfig adc_se = cfg.adc;
    adc_se.mode = AdcMode::SingleEnded;

    std::vector<double> acc(static_cast<std::size_t>(plan.m), 0.0);
    double offset_units = 0.0; // sum over single-ended conversions of coeff * driven rows
    for (std::size_t p = 0; p < in.drives.size(); ++p) {
        const std::vector<std::uint8_t>& drive = in.drives[p];
        const std::vector<double> currents = column_currents(tile, drive);
        long long driven = 0;
        for (std::uint8_t d : drive)
            driven += d;
        for (const Conversion& cv : l.passes[p].convs) {
            if (cv.minus_col >= 0) {
                for (int m = 0; m < plan.m; ++m) {
                    const int c0 = m * l.cols_per_output;
                    const double diff = currents[static_cast<std::size_t>(c0 + cv.plus_col)] -
                                        currents[static_cast<std::size_t>(c0 + cv.minus_col)];
                    acc[static_cast<std::size_t>(m)] += cv.coeff * adc_convert(diff, i_max_diff, adc_diff);
                }
            } else {
                offset_units += static_cast<double>(cv.coeff) * static_cast<double>(driven);
                for (int m = 0; m < plan.m; ++m) {
                    const int c0 = m * l.cols_per_output;
                    acc[static_cast<std::size_t>(m)] +=
                        cv.coeff * adc_convert(currents[static_cast<std::size_t>(c0 + cv.plus_col)],
                                               i_max_se, adc_se);
                }
            }
        }
    }

    const double analog_corr = opts.apply_analog_correction ? -cfg.i_hrs * offset_units : 0.0;
    const CorrectionSpec& corr = plan.correction;
    std::vector<long long> out(static_cast<std::size_t>(plan.m), 0);
    for (int m = 0; m < plan.m; ++m) {
        double r = l.scale_num * (acc[static_cast<std::size_t>(m)] + analog_corr) / i_mm;
        if (!corr.row_const.empty()) {
            long long rc = corr.row_const[static_cast<std::size_t>(m)];
            if (corr.const_excludes_zero_inputs) {
                // BNN I/II: padding zeros contribute neither current nor weight.
                // row_const carries -/+ sum(w); add back the excluded weights.
                const int sign = scheme.kind() == MappingKind::BnnI ? -1 : 1;
                for (int z : in.zero_positions)
                    rc -= sign * plan.weights.at(m, z);
            }
            r += static_cast<double>(rc);
        }
        r += static_cast<double>(corr.input_sum_coeff) * static_cast<double>(in.input_sum);
        r += static_cast<double>(corr.nonzero_count_coeff) * static_cast<double>(in.nonzero);
        out[static_cast<std::size_t>(m)] = std::llround(r);
    }
    return out;
}

} // namespace xbarsim
