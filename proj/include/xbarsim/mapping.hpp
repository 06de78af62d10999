#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xbarsim/xbar.hpp"

namespace xbarsim {

// The eleven integer->crossbar translation schemes. BNN kinds operate on the
// {-1,+1} alphabet, TNN kinds on {-1,0,+1}.
enum class MappingKind {
    BnnI, BnnII, BnnIII, BnnIV, BnnV, BnnVI,
    TnnI, TnnII, TnnIII, TnnIV, TnnV,
};

// Where a kind admits two realizations, MoreCells folds all drive phases into
// one physical pass by replicating input rows; MoreCycles runs one pass per
// drive phase on a single row set.
enum class MappingVariant { MoreCells, MoreCycles };

// Which {0,1} component of an integer input a drive vector carries.
enum class InputBit {
    Pos,     // x > 0
    Neg,     // x < 0
    TcLow,   // two's-complement bit 0: x != 0
    TcHigh,  // two's-complement bit 1: x < 0
    OffLow,  // offset (x+1) bit 0: x == 0
    OffHigh, // offset (x+1) bit 1: x > 0
};

// One ADC conversion: a column (pair) within an output's column group and the
// digital weight applied to the converted value.
struct Conversion {
    int plus_col = 0;
    int minus_col = -1; // -1: single-ended
    int coeff = 1;
};

// One physical crossbar pass. `component` selects the drive bits when the
// scheme uses a single row set (row_blocks == 1); with replicated rows the
// per-block components come from SchemeLayout::block_components instead.
struct PassSpec {
    InputBit component = InputBit::Pos;
    std::vector<Conversion> convs;
};

struct SchemeLayout {
    int row_blocks = 1;
    int cols_per_output = 1;
    int scale_num = 1; // integer result scale = scale_num / I_mm
    std::vector<InputBit> block_components;
    std::vector<PassSpec> passes;
};

class MappingScheme {
public:
    explicit MappingScheme(MappingKind kind, MappingVariant variant = MappingVariant::MoreCells);

    MappingKind kind() const { return kind_; }
    MappingVariant variant() const { return variant_; }
    bool has_variants() const;
    bool ternary() const;

    int cycles() const;
    int cells_per_weight() const;
    int row_blocks() const { return layout_.row_blocks; }
    int cols_per_output() const { return layout_.cols_per_output; }
    int passes() const { return static_cast<int>(layout_.passes.size()); }
    const SchemeLayout& layout() const { return layout_; }

    // "bnn-i" .. "tnn-v", with "+cells"/"+cycles" suffix for variant kinds.
    std::string name() const;
    static MappingScheme from_name(const std::string& name);
    static std::vector<std::string> known_names();
    // All kind x variant combinations (fixed kinds appear once).
    static std::vector<MappingScheme> all_schemes();

private:
    MappingKind kind_;
    MappingVariant variant_;
    SchemeLayout layout_;
};

// Digital correction structure of one mapping; the input-dependent parts are
// evaluated per inference from the encoded input.
struct CorrectionSpec {
    std::vector<long long> row_const;   // per-output compile-time term, empty if none
    bool const_excludes_zero_inputs = false; // BNN I/II: zero (padding) inputs drop their weight
    int input_sum_coeff = 0;            // coefficient on sum(i_NN)
    int nonzero_count_coeff = 0;        // coefficient on the driven-input count (BNN V)
};

struct DigitalPlan {
    MappingScheme scheme{MappingKind::BnnI};
    int m = 0; // logical outputs
    int n = 0; // logical inputs
    BitMatrix cell_targets; // (n * row_blocks) x (m * cols_per_output)
    IntMatrix weights;      // retained for input-dependent correction terms
    CorrectionSpec correction;
};

struct EncodedInput {
    int n = 0;
    std::vector<std::vector<std::uint8_t>> drives; // one per pass
    long long input_sum = 0;
    long long nonzero = 0;
    std::vector<int> zero_positions;
};

// Builds the cell planes and correction constants for a weight tile.
// Weight entries must lie in the scheme alphabet.
DigitalPlan encode_weights(const IntMatrix& w, const MappingScheme& scheme);

// Produces one binary drive vector per pass. BNN kinds additionally accept 0
// as an inert padding value (no drive, excluded from corrections).
EncodedInput encode_inputs(std::span<const int> v, const MappingScheme& scheme);

// Decodes a plan's cell planes back to integer weights (round-trip check).
IntMatrix decode_weights(const DigitalPlan& plan);

struct MvmOptions {
    bool apply_analog_correction = true;
};

// Executes the scheme's passes against a programmed crossbar, converts column
// currents through the ADC, and applies scale plus correction terms. Returns
// the integer result vector (length m), rounded half away from zero.
std::vector<long long> mvm_on_crossbar(const DigitalPlan& plan, const EncodedInput& in,
                                       const Crossbar& xbar, const MvmOptions& opts = {});

} // namespace xbarsim
