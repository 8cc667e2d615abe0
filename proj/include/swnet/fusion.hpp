#pragma once

#include "swnet/attention.hpp"
#include "swnet/params.hpp"

namespace swnet::fusion {

/// Per-stage bimodal gated fusion: independent per-modality channel gates
/// computed from globally pooled descriptors, concatenation, 1x1 integration,
/// then a CBAM pass over the integrated volume.
struct FusionParams {
    ad::Var gate_rgb_w, gate_rgb_b;  // (C,C,1,1), (C)
    ad::Var gate_nir_w, gate_nir_b;
    ad::Var integ_w, integ_b;        // (C,2C,1,1), (C)
    attention::CbamParams cbam;
};

void init_fusion(ParamSet& ps, const std::string& prefix, int channels, int cbam_ratio, Rng& rng);
FusionParams bind_fusion(ParamBinder& bind, const std::string& prefix, int channels,
                         int cbam_ratio);

/// Pre-sigmoid gate logits for one modality: Conv1x1(GAP(f)). Exposed
/// separately because the gate's scaling behaviour is part of the contract.
ad::Var modality_gate_logits(const ad::Var& f, const ad::Var& gate_w, const ad::Var& gate_b);

/// fused = cbam(Conv1x1([g_rgb * f_rgb ; g_nir * f_nir])) with
/// g_m = sigmoid(Conv1x1(GAP(f_m))). `use_cbam = false` replaces the CBAM
/// pass with identity (the "only Edge" ablation).
ad::Var gated_fuse(const ad::Var& f_rgb, const ad::Var& f_nir, const FusionParams& p,
                   bool use_cbam = true);

}  // namespace swnet::fusion
