"""False-accept rate against the decision threshold.

Runs a mixed genuine/imposter scenario and sweeps the MHD threshold tau.
FAR (imposters accepted) can only grow with tau and genuine accuracy can
only improve, so the table exposes the operating range where both are
acceptable; the default tau of 12 px sits inside it.
"""

from fpverify.evaluate import ScenarioConfig, report_at, report_text, run_trials

scenario = ScenarioConfig(
    seed=3,
    fingers=20,
    n_minutiae=30,
    jitter_sigma=1.0,
    k=3,
    genuine_pairs=100,
    imposter_pairs=100,
)
print("generating trials...")
outcomes = run_trials(scenario)

taus = [i * 2.0 for i in range(16)]
sweep = [(tau, report_at(outcomes, tau)) for tau in taus]
print(report_text(report_at(outcomes, scenario.tau), sweep, scenario.tau))
