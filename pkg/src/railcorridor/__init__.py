"""Railway corridor planning: link budgets, repeater ISD search, energy and off-grid PV."""
