#include "stylodet/embedder.hpp"

namespace stylodet {

const std::vector<std::string>& default_function_words() {
  static const std::vector<std::string> kWords = {
      "a", "aboard", "about", "above", "accordingly", "across", "actually", "after", "afterwards",
      "again", "against", "ago", "ah", "ain't", "albeit", "all", "almost", "alone", "along",
      "alongside", "already", "also", "although", "always", "am", "amid", "among", "amongst",
      "amoungst", "amount", "an", "and", "another", "any", "anybody", "anyhow", "anyone",
      "anything", "anyway", "anywhere", "apparently", "are", "aren't", "around", "as", "at", "atop",
      "back", "basically", "be", "became", "because", "become", "becomes", "becoming", "been",
      "before", "beforehand", "behind", "being", "below", "beneath", "beside", "besides", "between",
      "beyond", "bill", "bit", "both", "bottom", "but", "by", "call", "can", "can't", "cannot",
      "cant", "certainly", "clearly", "co", "con", "consequently", "could", "couldn't", "couldnt",
      "cry", "dare", "de", "describe", "despite", "detail", "did", "didn't", "do", "does",
      "doesn't", "doing", "don't", "done", "down", "due", "during", "each", "early", "eg", "eight",
      "either", "eleven", "else", "elsewhere", "empty", "enough", "ere", "etc", "even", "ever",
      "every", "everybody", "everyone", "everything", "everywhere", "except", "few", "fewer",
      "fifteen", "fifty", "fill", "find", "fire", "first", "five", "for", "former", "formerly",
      "forth", "forty", "found", "four", "from", "front", "full", "further", "furthermore", "get",
      "gets", "getting", "give", "go", "goes", "going", "gone", "gonna", "got", "gotta", "had",
      "hadn't", "has", "hasn't", "hasnt", "have", "haven't", "having", "he", "he'd", "he'll",
      "he's", "hence", "her", "here", "here's", "hereafter", "hereby", "herein", "hereupon", "hers",
      "herself", "hey", "him", "himself", "his", "hither", "hitherto", "hmm", "how", "how's",
      "however", "hundred", "i", "i'd", "i'll", "i'm", "i've", "ie", "if", "in", "inasmuch", "inc",
      "indeed", "inside", "insofar", "instead", "interest", "into", "is", "isn't", "it", "it'd",
      "it'll", "it's", "its", "itself", "just", "keep", "kind", "kinda", "last", "later", "latter",
      "latterly", "least", "less", "lest", "let's", "like", "likewise", "literally", "lol", "lot",
      "lots", "ltd", "made", "make", "makes", "making", "many", "may", "maybe", "me", "meanwhile",
      "might", "mightn't", "mill", "mine", "more", "moreover", "most", "mostly", "move", "much",
      "must", "mustn't", "my", "myself", "name", "namely", "near", "need", "needn't", "neither",
      "never", "nevertheless", "next", "nine", "no", "nobody", "none", "nonetheless", "noone",
      "nope", "nor", "not", "nothing", "notwithstanding", "now", "nowhere", "o'clock", "obviously",
      "of", "off", "often", "oh", "ok", "okay", "on", "once", "one", "only", "onto", "or", "other",
      "others", "otherwise", "ought", "oughtn't", "our", "ours", "ourselves", "out", "outside",
      "over", "own", "part", "past", "per", "perhaps", "please", "plus", "probably", "put", "quite",
      "rarely", "rather", "re", "really", "regarding", "round", "said", "same", "sans", "say",
      "saying", "says", "second", "see", "seem", "seemed", "seeming", "seems", "seldom", "serious",
      "seven", "several", "shall", "shan't", "she", "she'd", "she'll", "she's", "should",
      "shouldn't", "show", "side", "similarly", "simply", "since", "sincere", "six", "sixty", "so",
      "some", "somebody", "somehow", "someone", "something", "sometime", "sometimes", "somewhere",
      "soon", "sort", "sorta", "still", "stuff", "such", "surely", "system", "take", "ten", "than",
      "that", "that'd", "that'll", "that's", "the", "thee", "their", "theirs", "them", "themselves",
      "then", "thence", "there", "there'd", "there'll", "there's", "thereafter", "thereby",
      "therefore", "therein", "thereupon", "these", "they", "they'd", "they'll", "they're",
      "they've", "thick", "thin", "thine", "thing", "things", "third", "this", "those", "thou",
      "though", "three", "through", "throughout", "thru", "thus", "thy", "till", "to", "today",
      "together", "tomorrow", "tonight", "too", "top", "toward", "towards", "twelve", "twenty",
      "twice", "two", "un", "under", "underneath", "unless", "unlike", "until", "unto", "up",
      "upon", "us", "used", "usually", "versus", "very", "via", "wanna", "was", "wasn't", "way",
      "we", "we'd", "we'll", "we're", "we've", "well", "went", "were", "weren't", "what", "what'd",
      "what'll", "what's", "whatever", "whatsoever", "when", "when's", "whence", "whenever",
      "where", "where's", "whereafter", "whereas", "whereby", "wherein", "whereupon", "wherever",
      "whether", "which", "whichever", "while", "whilst", "whither", "who", "who'd", "who'll",
      "who's", "whoever", "whole", "whom", "whomever", "whose", "why", "why's", "will", "with",
      "within", "without", "won't", "would", "wouldn't", "wow", "y'all", "yeah", "yep", "yes",
      "yesterday", "yet", "yonder", "you", "you'd", "you'll", "you're", "you've", "your", "yours",
      "yourself", "yourselves",
  };
  return kWords;
}

}  // namespace stylodet
