"""Reference positions of the concave kite family, used as regression targets.

Each row: label, mass key, q3, q4.  Mass keys are numbers or one of
``"pitchfork"``, ``"fold"``, ``"inf"``.  Rows flagged in ``KNOWN_DEFECTS`` do
not agree with the certified solutions at their listed mass; the reason is
kept next to the row.
"""

import math

R3 = math.sqrt(3.0)

TABLE_ROWS = [
    ("A1", 0.0, (0.0, 0.0), (0.0, R3)),
    ("A2", 0.0, (0.0, R3), (0.0, R3)),
    ("B1", 0.4, (0.0, 0.08545589736279062), (0.0, 1.337330078035445)),
    ("B2", 0.4, (0.0, 1.1886118075960026), (0.0, 2.234523889944714)),
    ("P1", "pitchfork", (0.0, 0.5423375242243517), (0.0, 1.69144572423217)),
    ("P2", "pitchfork", (0.0, 0.6854333316530508), (0.0, 1.8579255427192582)),
    ("D1", 0.996, (0.0, 0.5564341378652076), (0.0, 1.70775303282403)),
    ("D2", 0.996, (0.0, 0.6503784729520715), (0.0, 1.8415795609684507)),
    ("D3", 0.996, (-0.009906700029766125, 0.5423813608539542), (0.04880076418676227, 1.6905216297662835)),
    ("D4", 0.996, (0.009906700029766125, 0.5423813608539542), (-0.04880076418676227, 1.6905216297662835)),
    ("E1", 1.0, (0.0, 1.0 / R3), (0.0, R3)),
    ("E2", 1.0, (0.0, 0.6503784729520715), (0.0, 1.817239394723845)),
    ("E3", 1.0, (-0.014277689766976964, 0.5424284291298985), (0.07027749578541109, 1.6895283608200573)),
    ("E4", 1.0, (0.014277689766976964, 0.5424284291298985), (-0.07027749578541109, 1.6895283608200573)),
    ("F", "fold", (0.0, 0.6138576372995270328), (0.0, 1.7746305435327241844)),
    ("F3", "fold", (-0.016582744680756933, 0.5424600163486574), (0.08158057491289805, 1.688861170203973)),
    ("F4", "fold", (0.016582744680756933, 0.5424600163486574), (-0.08158057491289805, 1.688861170203973)),
    ("G3", 2.0, (-0.13477940502391195, 0.5485425650707881), (0.5904621819032521, 1.5460132316491686)),
    ("G4", 2.0, (0.13477940502391195, 0.5485425650707881), (-0.5904621819032521, 1.5460132316491686)),
    ("H3", "inf", (-0.23430343925991237, 0.5533288328036454), (0.8620451062243932, 1.3456025507794094)),
    ("H4", "inf", (0.23430343925991237, 0.5533288328036454), (-0.8620451062243932, 1.3456025507794094)),
]

KNOWN_DEFECTS = {
    "D2": "listed q3 repeats the E2 value; the certified solution has q3y = 0.671315754589388...",
    "F3": "agrees with the solution at m = 1.0027 rather than at the mass maximum",
    "F4": "agrees with the solution at m = 1.0027 rather than at the mass maximum",
}

# stationary points of the kite curve b = b_hat(a)
B_HAT_MIN = (1.0068269818055548, 1.6641309857549297)
B_HAT_MAX = (1.5397067078739939865, 2.4488397355312008965)
M_HAT_MAX = (1.1733802447932032924, 1.00271332903708271708)

# mass maximum (a0, b0, m0) and symmetry-breaking mass
FOLD_AB = (1.1733802447932033, 2.0369863931895206)
FOLD_M = 1.002713329037083
PITCHFORK_M = 0.992299447752385

# fold test quantities and the shape-system Jacobian there
FOLD_T1 = -227.0053559531752
FOLD_T3 = -18222.7411964396
FOLD_JG = ((4.5172058916474534, -2.3231832749879904), (231.5225618448226, -119.07124810379195))
