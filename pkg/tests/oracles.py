"""Reference values computed independently with mpmath at 50 digits and frozen here.

Each constant was obtained by direct quadrature or closed-form evaluation in
mpmath, not through any distprop code path.
"""

INV_SQRT_2PI = 0.3989422804014327

# two-mode input: 0.6 N(2, 0.5^2) + 0.4 N(-1, 1)
MIXTURE_PDF_AT_2 = 0.48050347584649442
MIXTURE_ICDF_AT_0_9 = 2.4840403545797197

# logistic 1 / (1 + exp(1 - x)) evaluated at x = 3
SIGMOID_AT_3 = 0.88079707797788244

# moments of the sigmoid output by mpmath.quad over the input density
SIGMOID_OUTPUT_MEAN = 0.49453349655802898
SIGMOID_OUTPUT_VAR = 0.088502220567165758

# local maxima of the output density by a 10^6-point grid search in mpmath
SIGMOID_OUTPUT_MODES = (0.0524, 0.7551)

# if the first mixture term uses exp(-(logit - 2)^2) instead of exp(-2 (logit - 2)^2)
# the "density" integrates to this instead of 1
UNCORRECTED_OUTPUT_MASS = 1.2485

# pi r^4 dP / (8 mu l) at dP=5.5e6, mu=4, l=7, r=0.085
FLOW_AT_MEAN_INPUTS = 4.0266162949570373
# exact E[Q] and sd[Q] for the independent input laws (products of 1-D moments)
FLOW_MEAN = 4.0281721830131010
FLOW_SD = 0.094011199804443325

# chi-square 0.999 quantile with 99 degrees of freedom
CHI2_999_DF99 = 148.23035916510173

TWO_OVER_PI = 0.63661977236758134
