"""A corpus of deterministic functional programs.

Every program is first-order or uses explicit partial application, has
no overlapping rules and introduces no free variables, so evaluation is
a single chain of steps.  `expected` holds the value each goal reduces
to, as rendered source text; the big-step oracle reproduces each one.
"""

FUNCTIONAL_CORPUS = [
    ("ident", """
ident x = x
""", "ident 5", "5"),
    ("notB", """
notB True = False
notB False = True
""", "notB True", "False"),
    ("andB", """
andB True  y = y
andB False y = False
""", "andB True False", "False"),
    ("orB", """
orB True  y = True
orB False y = y
""", "orB False True", "True"),
    ("length", """
len [] = 0
len (x:xs) = 1 + len xs
""", "len [1,2,3]", "3"),
    ("append", """
append [] ys = ys
append (x:xs) ys = x : append xs ys
""", "append [1,2] [3]", "[1,2,3]"),
    ("reverse", """
append [] ys = ys
append (x:xs) ys = x : append xs ys
rev [] = []
rev (x:xs) = append (rev xs) [x]
""", "rev [1,2,3]", "[3,2,1]"),
    ("map", """
inc x = x + 1
map f [] = []
map f (x:xs) = f x : map f xs
""", "map inc [1,2]", "[2,3]"),
    ("foldr", """
plus x y = x + y
foldr f z [] = z
foldr f z (x:xs) = f x (foldr f z xs)
""", "foldr plus 0 [1,2,3]", "6"),
    ("take", """
ite True  t e = t
ite False t e = e
take n [] = []
take n (x:xs) = ite (n == 0) [] (x : take (n - 1) xs)
""", "take 2 [5,6,7]", "[5,6]"),
    ("elem", """
orB True  y = True
orB False y = y
elemI x [] = False
elemI x (y:ys) = orB (x == y) (elemI x ys)
""", "elemI 2 [1,2]", "True"),
    ("peano-add", """
data Peano = Z | S Peano
addP Z     y = y
addP (S x) y = S (addP x y)
""", "addP (S (S Z)) (S Z)", "S (S (S Z))"),
    ("peano-mul", """
data Peano = Z | S Peano
addP Z     y = y
addP (S x) y = S (addP x y)
mulP Z     y = Z
mulP (S x) y = addP y (mulP x y)
""", "mulP (S (S Z)) (S (S (S Z)))", "S (S (S (S (S (S Z)))))"),
    ("fib", """
ite True  t e = t
ite False t e = e
fib n = ite (n < 2) n (fib (n - 1) + fib (n - 2))
""", "fib 10", "55"),
    ("fact", """
ite True  t e = t
ite False t e = e
fact n = ite (n == 0) 1 (n * fact (n - 1))
""", "fact 5", "120"),
    ("insertion-sort", """
ite True  t e = t
ite False t e = e
insert x [] = [x]
insert x (y:ys) = ite (x <= y) (x : y : ys) (y : insert x ys)
isort [] = []
isort (x:xs) = insert x (isort xs)
""", "isort [3,1,2]", "[1,2,3]"),
    ("zip-pairs", """
data Pair a b = Pair a b
zipP [] ys = []
zipP (x:xs) [] = []
zipP (x:xs) (y:ys) = Pair x y : zipP xs ys
""", "zipP [1,2] [3,4]", "[Pair 1 3,Pair 2 4]"),
    ("sum", """
sumL [] = 0
sumL (x:xs) = x + sumL xs
""", "sumL [1,2,3,4]", "10"),
    ("max", """
ite True  t e = t
ite False t e = e
maxI x y = ite (x <= y) y x
""", "maxI 7 3", "7"),
    ("replicate", """
ite True  t e = t
ite False t e = e
repl n x = ite (n == 0) [] (x : repl (n - 1) x)
""", "repl 3 9", "[9,9,9]"),
    ("twice", """
inc x = x + 1
twice f x = f (f x)
""", "twice inc 5", "7"),
    ("peano-even", """
data Peano = Z | S Peano
evenP Z = True
evenP (S x) = oddP x
oddP Z = False
oddP (S x) = evenP x
""", "evenP (S (S Z))", "True"),
    ("quicksort", """
ite True  t e = t
ite False t e = e
append [] ys = ys
append (x:xs) ys = x : append xs ys
smaller p [] = []
smaller p (x:xs) = ite (x < p) (x : smaller p xs) (smaller p xs)
larger p [] = []
larger p (x:xs) = ite (x < p) (larger p xs) (x : larger p xs)
qsort [] = []
qsort (x:xs) = append (qsort (smaller x xs)) (x : qsort (larger x xs))
""", "qsort [3,1,4,2]", "[1,2,3,4]"),
]
