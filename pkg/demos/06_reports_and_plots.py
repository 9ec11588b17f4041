"""Report documents and figures, driven through the command-line entry point.

Run: python3 demos/06_reports_and_plots.py [output directory]
"""

import sys

from reeblift.cli import main

out = sys.argv[1] if len(sys.argv) > 1 else "demo-out"

# %% JSON report plus orbit table for n = 2, and the four SVG figures.
print("verify exit status:", main(["verify", "--n", "2", "--eps", "0.5", "--out", out, "--format", "text"]))
print("plot exit status:", main(["plot", "--n", "2", "--eps", "0.5", "--out", out]))

# %% A forced failure names the first violated inequality and exits with status 1.
print("forced failure exit status:",
      main(["verify", "--n", "2", "--eps", "0.5", "--delta", "0.4", "--eta", "0.99", "--out", out,
            "--format", "csv"]))
