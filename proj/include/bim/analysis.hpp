// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BIM_ANALYSIS_HPP
#define BIM_ANALYSIS_HPP

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bim/model.hpp"
#include "bim/transceiver.hpp"
#include "bim/types.hpp"

namespace bim {

// Exact non-negative ratio in lowest terms; DoF formulas are compared with ==.
struct Fraction
{
    std::int64_t num = 0;
    std::int64_t den = 1;

    Fraction() = default;
    Fraction(std::int64_t n, std::int64_t d = 1);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    friend bool operator==(const Fraction&, const Fraction&) = default;
};

Fraction operator*(const Fraction& a, const Fraction& b);
Fraction max(const Fraction& a, const Fraction& b);
std::ostream& operator<<(std::ostream& os, const Fraction& f);

// Sum-DoF of the block scheme itself: sum_k U'_k M_k / (N + L_I - 1).
Fraction dof_scheme(const SystemConfig& cfg);

// Achievable sum-DoF: the scheme value clamped below by the TDMA value 1.
Fraction dof_theorem1(const SystemConfig& cfg);

// Same formula evaluated from explicit symmetric parameters, so L_I is honoured
// even for K = 1 where no interfering link exists in a config.
Fraction dof_scheme_symmetric(int cells, int desired_len, int ici_len, int users);

// K (1 - L_I / L_D); requires U >= L_D - L_I and L_D >= 2 L_I.
Fraction dof_symmetric(int cells, int desired_len, int ici_len, int users);
bool dof_symmetric_applicable(int desired_len, int ici_len, int users);

// K (L_D - L_I) / max{2 L_D - L_I - 1, 2 L_I - 1}; requires L_D > L_I.
Fraction dof_interference_channel(int cells, int desired_len, int ici_len);

struct RateReport
{
    std::vector<std::vector<double>> per_stream;  // bits per stream-use, before the time-share factor
    std::vector<double> per_cell;                 // R_k, bits per channel use
    double network_sum = 0.0;
    double dof_formula = 0.0;
    double slope = 0.0;          // filled by slope estimators
    double baseline = 0.0;       // TDMA-OFDMA network rate when computed
};

// Time-share factor applied to the per-stream rates.
enum class RateNormalization {
    asymptotic,  // 1 / (N + L_I - 1), B -> infinity
    finite_block // B / T
};

// ZF-SIC rate: per-stream log2(1 + (N / M_k) |r_{k,m}|^2 rho) from the positive-diagonal QR of H~_k.
RateReport sum_rate_qr(const TransmissionPlan& plan, std::span<const EffectiveChannel> eff, double snr_linear,
                       RateNormalization norm = RateNormalization::asymptotic);

// log2 det(I + rho~ H~^H H~) for one cell: the joint-decoding bound on the ZF-SIC sum.
double logdet_rate(const CMatrix& h, double effective_snr);

struct BaselineRate
{
    double network = 0.0;               // sum over cells, each active 1/K of the time
    std::vector<double> per_cell;       // each cell's contribution to the network sum
    double per_cell_average() const;    // network / K
};

// Round-robin TDMA across cells, N_c-subcarrier OFDMA with CP L_D - 1 inside each cell.
// Every subcarrier is used: n belongs to user n mod min(U_k, N_c), so set sizes differ by
// at most one. Equal power on every subcarrier with E|x[n]|^2 = 1.
BaselineRate baseline_tdma_ofdma(const SystemConfig& cfg, const ChannelRealization& ch, double snr_linear,
                                 int subcarriers);

// All cells transmit OFDMA simultaneously; ICI (including its leakage past the CP) is
// treated as Gaussian noise per subcarrier. Rate of cell k in bits per channel use, with
// powers taken from the deployment (P in mW, sigma^2 in mW). Every subcarrier is used:
// n belongs to user n mod U, and each user spreads P over its own set (P N_c / |S_u| each).
double ofdma_ici_as_noise_rate(const SystemConfig& cfg, const Deployment& dep, const ChannelRealization& ch, int k,
                               int subcarriers);

enum class Scheme { proposed, tdma_ofdma };

struct ErgodicPoint
{
    double snr_db = 0.0;
    double mean = 0.0;     // network rate
    double std_error = 0.0;
    std::vector<double> mean_per_cell;
};

// Averages over `trials` IID channel draws seeded by child_seed(cfg.seed, t).
// The proposed scheme uses the finite-block normalization B / T.
std::vector<ErgodicPoint> ergodic_rate(const SystemConfig& cfg, std::span<const double> snr_db, int trials,
                                       Scheme scheme, unsigned workers = 0);

// (R(rho2) - R(rho1)) / (log2 rho2 - log2 rho1); requires rho2 > rho1 >= 1e4 (linear).
double highsnr_slope(double rho1, double rate1, double rho2, double rate2);

} // namespace bim

#endif
